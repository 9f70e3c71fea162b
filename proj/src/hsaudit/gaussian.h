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

#ifndef HSAUDIT_GAUSSIAN_H_
#define HSAUDIT_GAUSSIAN_H_

namespace hsaudit {

// Standard normal cdf.
double NormalCdf(double x);
// 1 - NormalCdf(x), accurate in the upper tail.
double NormalSurvival(double x);
// Inverse of NormalCdf on (0, 1); +-infinity at the endpoints.
double NormalQuantile(double p);
// P(lo < Z <= hi) for a standard normal Z, without cancellation in either
// tail.
double NormalIntervalMass(double lo, double hi);

// delta(eps) of the Gaussian mechanism with sensitivity 1 and noise stddev
// sigma: Phi(1/(2 sigma) - eps sigma) - e^eps Phi(-1/(2 sigma) - eps sigma).
double GaussianMechanismDelta(double epsilon, double sigma);

// Trade-off of N(0, 1) vs N(mu, 1): Phi(Phi^-1(1 - alpha) - mu).
double GaussianTradeoff(double alpha, double mu);

}  // namespace hsaudit

#endif  // HSAUDIT_GAUSSIAN_H_
