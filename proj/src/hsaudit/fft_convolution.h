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

#ifndef HSAUDIT_FFT_CONVOLUTION_H_
#define HSAUDIT_FFT_CONVOLUTION_H_

#include <cstdint>
#include <span>
#include <vector>

namespace hsaudit {

// Linear convolution of two real sequences; the result has
// a.size() + b.size() - 1 entries. Short inputs are convolved directly, long
// ones through a real-to-complex FFT. Safe to call concurrently.
std::vector<double> Convolve(std::span<const double> a,
                             std::span<const double> b);

// The times-fold circular self-convolution of `a` zero-padded to `size`
// entries, computed with one forward and one inverse transform. Requires
// a.size() <= size. Safe to call concurrently.
std::vector<double> CircularPower(std::span<const double> a, int64_t times,
                                  size_t size);

// Smallest n' >= n whose prime factors are all in {2, 3, 5, 7}.
size_t FftFriendlySize(size_t n);

}  // namespace hsaudit

#endif  // HSAUDIT_FFT_CONVOLUTION_H_
