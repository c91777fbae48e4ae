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


#include "ldpfreq/metrics.h"

#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "ldpfreq/mechanism.h"

namespace ldpfreq {
namespace {

absl::Status CheckSameSize(size_t a, size_t b) {
  if (a != b) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension mismatch: ", a, " vs ", b));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> Mse(std::span<const double> estimate,
                           const Distribution& truth) {
  if (absl::Status st = CheckSameSize(estimate.size(), truth.k()); !st.ok())
    return st;
  double acc = 0.0;
  for (int i = 0; i < truth.k(); ++i) {
    const double diff = estimate[i] - truth[i];
    acc += diff * diff;
  }
  return acc;
}

absl::StatusOr<double> TotalVariation(std::span<const double> a,
                                      const Distribution& b) {
  if (absl::Status st = CheckSameSize(a.size(), b.k()); !st.ok()) return st;
  double acc = 0.0;
  for (int i = 0; i < b.k(); ++i) acc += std::abs(a[i] - b[i]);
  return 0.5 * acc;
}

absl::StatusOr<double> KlDivergence(const Distribution& phi,
                                    const Distribution& model) {
  if (absl::Status st = CheckSameSize(phi.k(), model.k()); !st.ok()) return st;
  double acc = 0.0;
  for (int i = 0; i < phi.k(); ++i) {
    if (phi[i] == 0.0) continue;
    if (model[i] == 0.0) {
      return absl::OutOfRangeError(absl::StrCat(
          "infinite divergence: model assigns 0 to category ", i,
          " observed with frequency ", phi[i]));
    }
    acc += phi[i] * std::log(phi[i] / model[i]);
  }
  // Gibbs: the exact value is nonnegative; drop rounding-level negatives.
  return std::max(0.0, acc);
}

absl::StatusOr<double> NegLogLikelihood(const Distribution& theta,
                                        const Distribution& phi,
                                        const RRParams& params) {
  return NegLogLikelihood(theta.probs(), phi, params);
}

absl::StatusOr<double> NegLogLikelihood(std::span<const double> theta,
                                        const Distribution& phi,
                                        const RRParams& params) {
  if (absl::Status st = CheckSameSize(theta.size(), phi.k()); !st.ok())
    return st;
  if (absl::Status st = CheckSameSize(phi.k(), params.k); !st.ok()) return st;
  const double d = params.p - params.q;
  double acc = 0.0;
  for (int y = 0; y < phi.k(); ++y) {
    if (phi[y] == 0.0) continue;
    const double m = params.q + d * theta[y];
    if (m <= 0.0) return std::numeric_limits<double>::infinity();
    acc -= phi[y] * std::log(m);
  }
  return acc;
}

double InvVarianceTheoretical(double theta_i, int64_t n,
                              const RRParams& params) {
  const double p = params.p;
  const double q = params.q;
  const double d = p - q;
  const double nd = static_cast<double>(n) * d;
  return q * (1.0 - q) / nd + theta_i * d * (1.0 - 2.0 * q - d) / nd;
}

double InvVarianceMultinomial(double theta_i, int64_t n,
                              const RRParams& params) {
  const double d = params.p - params.q;
  const double m = params.q + d * theta_i;
  return m * (1.0 - m) / (static_cast<double>(n) * d * d);
}

absl::StatusOr<MetricRow> ComputeMetrics(const Distribution& estimate,
                                         const Distribution& truth,
                                         const Distribution& phi,
                                         const RRParams& params) {
  MetricRow row;
  absl::StatusOr<double> v = Mse(estimate.probs(), truth);
  if (!v.ok()) return v.status();
  row.mse = *v;
  v = TotalVariation(estimate.probs(), truth);
  if (!v.ok()) return v.status();
  row.tv = *v;
  v = NegLogLikelihood(estimate, phi, params);
  if (!v.ok()) return v.status();
  row.nll_per_sample = *v;
  absl::StatusOr<Distribution> model = CompoundDistribution(estimate, params);
  if (!model.ok()) return model.status();
  v = KlDivergence(phi, *model);
  if (!v.ok()) return v.status();
  row.kl_phi_vs_model = *v;
  return row;
}

}  // namespace ldpfreq
