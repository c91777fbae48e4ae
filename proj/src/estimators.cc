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


#include "ldpfreq/estimators.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace ldpfreq {
namespace {

absl::Status CheckCompatible(const Distribution& phi, const RRParams& params) {
  if (phi.k() != params.k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: phi has ", phi.k(), " categories, channel ",
        params.k));
  }
  if (!(params.p > params.q)) {
    return absl::InvalidArgumentError("channel requires p > q");
  }
  return absl::OkStatus();
}

// Clamps rounding-level negatives and hands the vector to the internal
// Distribution constructor. Anything below -kClampTolerance is a bug.
absl::StatusOr<Distribution> FinishEstimate(std::vector<double> v,
                                            const char* who) {
  for (double& x : v) {
    if (x < 0.0 && x >= -kClampTolerance) x = 0.0;
  }
  absl::StatusOr<Distribution> out = Distribution::CreateInternal(std::move(v));
  if (!out.ok()) {
    return absl::InternalError(
        absl::StrCat(who, " produced an invalid distribution: ",
                     out.status().message()));
  }
  return out;
}

}  // namespace

absl::StatusOr<std::vector<double>> EstimateInv(const Distribution& phi,
                                                const RRParams& params) {
  if (absl::Status st = CheckCompatible(phi, params); !st.ok()) return st;
  const double d = params.p - params.q;
  std::vector<double> out(phi.k());
  for (int i = 0; i < phi.k(); ++i) out[i] = (phi[i] - params.q) / d;
  return out;
}

absl::StatusOr<Distribution> EstimateInvN(const Distribution& phi,
                                          const RRParams& params) {
  absl::StatusOr<std::vector<double>> inv = EstimateInv(phi, params);
  if (!inv.ok()) return inv.status();
  std::vector<double> v = *std::move(inv);
  for (double& x : v) x = std::max(0.0, x);
  // The positive part carries at least the total mass 1 of the inversion.
  const double mass = StableSum(v);
  for (double& x : v) x /= mass;
  return FinishEstimate(std::move(v), "InvN");
}

absl::StatusOr<Distribution> ProjectOntoSimplex(std::span<const double> v) {
  if (v.size() < 2) {
    return absl::InvalidArgumentError("projection needs at least 2 entries");
  }
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double prefix = 0.0;
  double shift = 0.0;
  for (size_t j = 0; j < u.size(); ++j) {
    prefix += u[j];
    const double candidate = (1.0 - prefix) / static_cast<double>(j + 1);
    if (u[j] + candidate > 0.0) shift = candidate;
  }
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::max(0.0, v[i] + shift);
  // The clipped vector sums to 1 up to rounding in the prefix sums.
  const double sum = StableSum(out);
  for (double& x : out) x /= sum;
  return FinishEstimate(std::move(out), "simplex projection");
}

absl::StatusOr<Distribution> EstimateInvP(const Distribution& phi,
                                          const RRParams& params) {
  absl::StatusOr<std::vector<double>> inv = EstimateInv(phi, params);
  if (!inv.ok()) return inv.status();
  return ProjectOntoSimplex(*inv);
}

absl::StatusOr<MleResult> EstimateMle(const Distribution& phi,
                                      const RRParams& params) {
  if (absl::Status st = CheckCompatible(phi, params); !st.ok()) return st;
  const int k = phi.k();
  const double q = params.q;

  // Ascending stable argsort. Sorting contiguous (value, index) pairs keeps
  // memory access sequential; the index tie-break reproduces stable order.
  std::vector<std::pair<double, int>> order(k);
  for (int j = 0; j < k; ++j) order[j] = {phi[j], j};
  std::sort(order.begin(), order.end());
  MleTrace trace;
  trace.sigma.resize(k);
  std::vector<double> e(k);
  for (int j = 0; j < k; ++j) {
    e[j] = order[j].first;
    trace.sigma[j] = order[j].second;
  }
  order = {};
  const std::vector<int>& sigma = trace.sigma;

  // suffix[i] = e[i] + ... + e[k - 1], Neumaier-compensated.
  std::vector<double> suffix(k + 1, 0.0);
  double sum = 0.0;
  double compensation = 0.0;
  for (int i = k - 1; i >= 0; --i) {
    const double v = e[i];
    const double t = sum + v;
    compensation += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
    suffix[i] = sum + compensation;
  }

  // Zero the next smallest category while its boundary value
  // (1 - i q) phi - q s is negative. Strict comparison: a zero boundary value
  // stops the scan at the smaller count.
  int i = 0;
  while (i < k && q * suffix[i] > e[i] * (1.0 - i * q)) ++i;
  if (i == k) {
    // Unreachable when p > q: the boundary value at K - 1 is (p - q) max phi.
    return absl::InternalError("MLE scan zeroed every category");
  }

  // p - q is taken as 1 - K q, its value under p + (K - 1) q = 1. Rounded
  // p and q miss that identity by an ulp, and 1 / (p - q) would scale the
  // miss into the output sum; extended precision limits the rest.
  const long double ql = q;
  const long double d = 1.0L - k * ql;
  const double s = suffix[i];
  const long double kept = 1.0L - i * ql;
  trace.n_zeros = i;
  trace.tau_star = e[i];
  trace.c_tau = static_cast<double>(kept / s);
  trace.lambda = static_cast<double>(d * s / kept);
  trace.g_at_n = static_cast<double>(kept * e[i] - ql * s);

  std::vector<double> theta(k, 0.0);
  const long double offset = ql * s;
  const long double denom = d * s;
  for (int j = i; j < k; ++j) {
    const long double v = e[j];
    theta[sigma[j]] = static_cast<double>((v * kept - offset) / denom);
  }
  absl::StatusOr<Distribution> dist = FinishEstimate(std::move(theta), "MLE");
  if (!dist.ok()) return dist.status();
  return MleResult{*std::move(dist), std::move(trace)};
}

absl::StatusOr<RrIbuIterator> RrIbuIterator::Create(const Distribution& phi,
                                                    const RRParams& params) {
  if (absl::Status st = CheckCompatible(phi, params); !st.ok()) return st;
  return RrIbuIterator(phi, params);
}

RrIbuIterator::RrIbuIterator(const Distribution& phi, const RRParams& params)
    : phi_(phi.vector()),
      q_(params.q),
      d_(params.p - params.q),
      theta_(phi.k(), 1.0 / phi.k()),
      ratio_(phi.k()) {}

double RrIbuIterator::Step() {
  const size_t k = theta_.size();
  for (size_t i = 0; i < k; ++i) {
    const double m = q_ + d_ * theta_[i];
    // m == 0 needs q == 0 and theta_i == 0, which only happens once phi_i == 0
    // has already zeroed the entry; that category stays at zero.
    ratio_[i] = m > 0.0 ? phi_[i] / m : 0.0;
  }
  s_ = StableSum(ratio_);
  double change = 0.0;
  for (size_t i = 0; i < k; ++i) {
    ratio_[i] = theta_[i] * (q_ * s_ + d_ * ratio_[i]);
  }
  const double total = StableSum(ratio_);
  for (size_t i = 0; i < k; ++i) {
    const double next = ratio_[i] / total;
    change = std::max(change, std::abs(next - theta_[i]));
    theta_[i] = next;
  }
  ++t_;
  return change;
}

absl::StatusOr<IbuState> EstimateIbuRr(const Distribution& phi,
                                       const RRParams& params,
                                       const IbuOptions& options) {
  if (options.n_iters < 0) {
    return absl::InvalidArgumentError("n_iters must be nonnegative");
  }
  absl::StatusOr<RrIbuIterator> it = RrIbuIterator::Create(phi, params);
  if (!it.ok()) return it.status();
  while (it->t() < options.n_iters) {
    const double change = it->Step();
    if (options.early_stop_tol.has_value() && change < *options.early_stop_tol)
      break;
  }
  absl::StatusOr<Distribution> theta = FinishEstimate(
      std::vector<double>(it->theta().begin(), it->theta().end()), "IBU");
  if (!theta.ok()) return theta.status();
  return IbuState{it->t(), *std::move(theta), it->s(), options.n_iters};
}

absl::StatusOr<Distribution> EstimateIbuGeneric(const Distribution& phi,
                                                const ChannelMatrix& channel,
                                                int64_t n_iters) {
  if (phi.k() != channel.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: phi has ", phi.k(), " categories, channel output ",
        channel.cols()));
  }
  if (channel.rows() < 2) {
    return absl::InvalidArgumentError("channel input space needs k >= 2");
  }
  if (n_iters < 0) {
    return absl::InvalidArgumentError("n_iters must be nonnegative");
  }
  const int k_in = channel.rows();
  const int k_out = channel.cols();
  std::vector<double> theta(k_in, 1.0 / k_in);
  std::vector<double> next(k_in);
  std::vector<double> weight(k_out);
  for (int64_t t = 0; t < n_iters; ++t) {
    for (int j = 0; j < k_out; ++j) {
      double denom = 0.0;
      for (int k = 0; k < k_in; ++k) denom += theta[k] * channel(k, j);
      weight[j] = denom > 0.0 ? phi[j] / denom : 0.0;
    }
    for (int i = 0; i < k_in; ++i) {
      double acc = 0.0;
      for (int j = 0; j < k_out; ++j) acc += weight[j] * channel(i, j);
      next[i] = theta[i] * acc;
    }
    const double total = StableSum(next);
    for (int i = 0; i < k_in; ++i) theta[i] = next[i] / total;
  }
  return FinishEstimate(std::move(theta), "generic IBU");
}

}  // namespace ldpfreq
