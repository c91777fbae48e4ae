// Copyright 2026 The ldpfreq Authors
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


#ifndef LDPFREQ_ESTIMATORS_H_
#define LDPFREQ_ESTIMATORS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpfreq/core.h"
#include "ldpfreq/mechanism.h"

namespace ldpfreq {

// Default iteration budget for IBU.
inline constexpr int64_t kDefaultIbuIterations = 40000;

// Linear inversion (phi_i - q) / (p - q). Unbiased, sums to 1, but entries
// may be negative, so the result is a plain vector and not a Distribution.
absl::StatusOr<std::vector<double>> EstimateInv(const Distribution& phi,
                                                const RRParams& params);

// Inversion followed by zeroing the negative entries and rescaling.
absl::StatusOr<Distribution> EstimateInvN(const Distribution& phi,
                                          const RRParams& params);

// Inversion followed by Euclidean projection onto the simplex.
absl::StatusOr<Distribution> EstimateInvP(const Distribution& phi,
                                          const RRParams& params);

// Euclidean projection of an arbitrary vector onto the probability simplex,
// O(K log K) via sorting.
absl::StatusOr<Distribution> ProjectOntoSimplex(std::span<const double> v);

// Diagnostics of the closed-form maximum likelihood estimate. Indices are
// 0-based.
struct MleTrace {
  // Stable argsort of phi, ascending.
  std::vector<int> sigma;
  // Number of zeroed categories: the sigma[0..n_zeros) entries.
  int n_zeros = 0;
  // Smallest phi value kept in the support, phi[sigma[n_zeros]]. Entries of
  // phi strictly below it are zeroed.
  double tau_star = 0.0;
  // Rescaling applied to the kept entries, (1 - n q) / sum of kept phi.
  double c_tau = 1.0;
  // Lagrange multiplier; kept entries equal phi_i / lambda - q / (p - q).
  double lambda = 0.0;
  // Boundary function (1 - n q) phi[sigma[n]] - q * sum of kept phi.
  double g_at_n = 0.0;
};

struct MleResult {
  Distribution theta;
  MleTrace trace;
};

// Exact maximum likelihood estimate of the input distribution for the RR
// channel, O(K log K).
//
// Sorts phi ascending and zeroes the n smallest categories, where n is the
// smallest count for which the rescaled inversion of the remaining ones is
// nonnegative. The survivors are phi_i / lambda - q / (p - q). Ties in phi
// never split between the zeroed and kept sets, and the result preserves the
// order of phi.
absl::StatusOr<MleResult> EstimateMle(const Distribution& phi,
                                      const RRParams& params);

struct IbuOptions {
  int64_t n_iters = kDefaultIbuIterations;
  // Stop once the L-infinity change between iterates falls below this.
  std::optional<double> early_stop_tol;
};

struct IbuState {
  // Number of completed iterations.
  int64_t t = 0;
  Distribution theta;
  // s from the last update; 0 before the first.
  double s = 0.0;
  int64_t n_iters = 0;
};

// Iterative Bayesian update specialised to RR, O(K) per step. Starts from
// the uniform prior.
class RrIbuIterator {
 public:
  // phi and params must agree on k; checked by the factory.
  static absl::StatusOr<RrIbuIterator> Create(const Distribution& phi,
                                              const RRParams& params);

  // Advances one iteration and returns the L-infinity change.
  double Step();

  int64_t t() const { return t_; }
  double s() const { return s_; }
  std::span<const double> theta() const { return theta_; }

 private:
  RrIbuIterator(const Distribution& phi, const RRParams& params);

  std::vector<double> phi_;
  double q_;
  double d_;
  std::vector<double> theta_;
  std::vector<double> ratio_;
  int64_t t_ = 0;
  double s_ = 0.0;
};

absl::StatusOr<IbuState> EstimateIbuRr(const Distribution& phi,
                                       const RRParams& params,
                                       const IbuOptions& options = {});

// Jeffrey's update with an explicit channel matrix, O(K_in K_out) per step.
// phi lives on the channel's output space; the result on its input space.
absl::StatusOr<Distribution> EstimateIbuGeneric(const Distribution& phi,
                                                const ChannelMatrix& channel,
                                                int64_t n_iters);

}  // namespace ldpfreq

#endif  // LDPFREQ_ESTIMATORS_H_
