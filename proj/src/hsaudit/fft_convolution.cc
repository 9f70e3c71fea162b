//
// Copyright 2026 The hsaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "hsaudit/fft_convolution.h"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>

namespace hsaudit {
namespace {

// Below this many multiply-adds the direct sum beats three transforms.
constexpr size_t kDirectConvolutionWork = 1 << 16;

// The FFTW planner keeps global state; plan creation and destruction must be
// serialized. Execution through fftw_execute_dft_* is thread-safe.
std::mutex& PlannerMutex() {
  static std::mutex mutex;
  return mutex;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

struct PlanDeleter {
  void operator()(fftw_plan plan) const {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(plan);
  }
};
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

std::vector<double> ConvolveDirect(std::span<const double> a,
                                   std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

size_t FftFriendlySize(size_t n) {
  for (size_t m = std::max<size_t>(n, 1);; ++m) {
    size_t r = m;
    for (size_t f : {2, 3, 5, 7}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

std::vector<double> Convolve(std::span<const double> a,
                             std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  if (a.size() * b.size() <= kDirectConvolutionWork) {
    return ConvolveDirect(a, b);
  }
  const size_t out_size = a.size() + b.size() - 1;
  const size_t n = FftFriendlySize(out_size);
  const size_t spectrum_size = n / 2 + 1;

  FftwBuffer<double> real_a(fftw_alloc_real(n));
  FftwBuffer<double> real_b(fftw_alloc_real(n));
  FftwBuffer<fftw_complex> spec_a(fftw_alloc_complex(spectrum_size));
  FftwBuffer<fftw_complex> spec_b(fftw_alloc_complex(spectrum_size));

  Plan forward;
  Plan backward;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    const int size = static_cast<int>(n);
    forward.reset(fftw_plan_dft_r2c_1d(size, real_a.get(), spec_a.get(),
                                       FFTW_ESTIMATE));
    backward.reset(fftw_plan_dft_c2r_1d(size, spec_a.get(), real_a.get(),
                                        FFTW_ESTIMATE));
  }

  std::fill_n(real_a.get(), n, 0.0);
  std::fill_n(real_b.get(), n, 0.0);
  std::copy(a.begin(), a.end(), real_a.get());
  std::copy(b.begin(), b.end(), real_b.get());
  fftw_execute_dft_r2c(forward.get(), real_a.get(), spec_a.get());
  fftw_execute_dft_r2c(forward.get(), real_b.get(), spec_b.get());
  for (size_t k = 0; k < spectrum_size; ++k) {
    const double re = spec_a[k][0] * spec_b[k][0] - spec_a[k][1] * spec_b[k][1];
    const double im = spec_a[k][0] * spec_b[k][1] + spec_a[k][1] * spec_b[k][0];
    spec_a[k][0] = re;
    spec_a[k][1] = im;
  }
  fftw_execute_dft_c2r(backward.get(), spec_a.get(), real_a.get());

  std::vector<double> out(out_size);
  const double scale = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < out_size; ++i) out[i] = real_a[i] * scale;
  return out;
}

std::vector<double> CircularPower(std::span<const double> a, int64_t times,
                                  size_t size) {
  const size_t spectrum_size = size / 2 + 1;
  FftwBuffer<double> real(fftw_alloc_real(size));
  FftwBuffer<fftw_complex> spectrum(fftw_alloc_complex(spectrum_size));
  Plan forward;
  Plan backward;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    const int n = static_cast<int>(size);
    forward.reset(
        fftw_plan_dft_r2c_1d(n, real.get(), spectrum.get(), FFTW_ESTIMATE));
    backward.reset(
        fftw_plan_dft_c2r_1d(n, spectrum.get(), real.get(), FFTW_ESTIMATE));
  }
  std::fill_n(real.get(), size, 0.0);
  std::copy(a.begin(), a.end(), real.get());
  fftw_execute_dft_r2c(forward.get(), real.get(), spectrum.get());
  for (size_t k = 0; k < spectrum_size; ++k) {
    const std::complex<double> value =
        std::pow(std::complex<double>(spectrum[k][0], spectrum[k][1]),
                 static_cast<double>(times));
    spectrum[k][0] = value.real();
    spectrum[k][1] = value.imag();
  }
  fftw_execute_dft_c2r(backward.get(), spectrum.get(), real.get());
  std::vector<double> out(size);
  const double scale = 1.0 / static_cast<double>(size);
  for (size_t i = 0; i < size; ++i) out[i] = real[i] * scale;
  return out;
}

}  // namespace hsaudit
