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


#ifndef LDPFREQ_METRICS_H_
#define LDPFREQ_METRICS_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "ldpfreq/core.h"

namespace ldpfreq {

struct MetricRow {
  double mse = 0.0;
  double tv = 0.0;
  double nll_per_sample = 0.0;
  double kl_phi_vs_model = 0.0;
};

// Squared L2 distance. The estimate may be any signed vector (e.g. Inv).
absl::StatusOr<double> Mse(std::span<const double> estimate,
                           const Distribution& truth);

// Half the L1 distance.
absl::StatusOr<double> TotalVariation(std::span<const double> a,
                                      const Distribution& b);

// sum_i phi_i log(phi_i / model_i), with 0 log(0/x) = 0. Infinite
// divergence (phi_i > 0 where model_i = 0) is an error.
absl::StatusOr<double> KlDivergence(const Distribution& phi,
                                    const Distribution& model);

// Per-sample negative log-likelihood of theta given the observed report
// histogram: -sum_y phi_y log(q + (p - q) theta_y). Multiply by N for the
// total. Natural log.
absl::StatusOr<double> NegLogLikelihood(const Distribution& theta,
                                        const Distribution& phi,
                                        const RRParams& params);
// Same for an arbitrary vector (e.g. Inv). Returns +inf if some observed
// category gets nonpositive model probability.
absl::StatusOr<double> NegLogLikelihood(std::span<const double> theta,
                                        const Distribution& phi,
                                        const RRParams& params);

// Element-wise variance of the inversion estimator in the printed textbook
// form: q(1-q)/(N(p-q)) + theta_i (p-q)(1-2q-(p-q)) / (N(p-q)).
double InvVarianceTheoretical(double theta_i, int64_t n,
                              const RRParams& params);

// Exact variance of the inversion estimator when the N reports are i.i.d.
// draws from M(theta): m(1-m) / (N (p-q)^2) with m = q + (p-q) theta_i.
double InvVarianceMultinomial(double theta_i, int64_t n,
                              const RRParams& params);

// Fills mse, tv against the truth and nll/kl against the observed phi.
absl::StatusOr<MetricRow> ComputeMetrics(const Distribution& estimate,
                                         const Distribution& truth,
                                         const Distribution& phi,
                                         const RRParams& params);

}  // namespace ldpfreq

#endif  // LDPFREQ_METRICS_H_
