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


#include "ldpfreq/oracle.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace ldpfreq::oracle {
namespace {

constexpr double kKktTolerance = 1e-13;

// Visits every composition of `total` into k nonnegative parts, in
// lexicographic order.
void ForEachLatticePoint(int k, int total,
                         const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> m(k, 0);
  std::function<void(int, int)> rec = [&](int idx, int remaining) {
    if (idx == k - 1) {
      m[idx] = remaining;
      fn(m);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      m[idx] = v;
      rec(idx + 1, remaining - v);
    }
  };
  rec(0, total);
}

std::vector<double> ToPoint(const std::vector<int>& m, int resolution) {
  std::vector<double> theta(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    theta[i] = static_cast<double>(m[i]) / resolution;
  }
  return theta;
}

// Per-sample NLL of the input distribution through a dense channel matrix.
class ChannelLikelihood {
 public:
  ChannelLikelihood(const Distribution& phi, const RRParams& params)
      : k_(phi.k()), phi_(phi.vector()), channel_(k_ * k_), model_(k_) {
    for (int i = 0; i < k_; ++i) {
      for (int j = 0; j < k_; ++j) {
        channel_[i * k_ + j] = i == j ? params.p : params.q;
      }
    }
  }

  int k() const { return k_; }
  double c(int i, int j) const { return channel_[i * k_ + j]; }

  std::span<const double> Model(std::span<const double> theta) {
    for (int j = 0; j < k_; ++j) {
      double m = 0.0;
      for (int i = 0; i < k_; ++i) m += theta[i] * c(i, j);
      model_[j] = m;
    }
    return model_;
  }

  double Value(std::span<const double> theta) {
    Model(theta);
    double acc = 0.0;
    for (int j = 0; j < k_; ++j) {
      if (phi_[j] == 0.0) continue;
      if (model_[j] <= 0.0) return std::numeric_limits<double>::infinity();
      acc -= phi_[j] * std::log(model_[j]);
    }
    return acc;
  }

  void Gradient(std::span<const double> theta, std::vector<double>& grad) {
    Model(theta);
    grad.assign(k_, 0.0);
    for (int j = 0; j < k_; ++j) {
      if (phi_[j] == 0.0) continue;
      const double w = phi_[j] / model_[j];
      for (int i = 0; i < k_; ++i) grad[i] -= w * c(i, j);
    }
  }

  // Derivative of the NLL along theta + delta (e_to - e_from).
  double DirectionalDerivative(int to, int from, double delta) const {
    double acc = 0.0;
    for (int j = 0; j < k_; ++j) {
      if (phi_[j] == 0.0) continue;
      const double dc = c(to, j) - c(from, j);
      acc -= phi_[j] * dc / (model_[j] + delta * dc);
    }
    return acc;
  }

 private:
  int k_;
  std::vector<double> phi_;
  std::vector<double> channel_;
  std::vector<double> model_;
};

// Index pair for the most violated KKT condition: `to` has the smallest
// gradient, `from` the largest among entries with positive mass.
struct Pair {
  int to = -1;
  int from = -1;
  double violation = 0.0;
};

Pair MostViolatingPair(const std::vector<double>& theta,
                       const std::vector<double>& grad) {
  Pair best;
  double g_min = std::numeric_limits<double>::infinity();
  double g_max = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < theta.size(); ++i) {
    if (grad[i] < g_min) {
      g_min = grad[i];
      best.to = static_cast<int>(i);
    }
    if (theta[i] > 0.0 && grad[i] > g_max) {
      g_max = grad[i];
      best.from = static_cast<int>(i);
    }
  }
  best.violation = g_max - g_min;
  return best;
}

double Renormalize(std::vector<double>& theta) {
  double sum = 0.0;
  for (double& v : theta) {
    v = std::max(0.0, v);
    sum += v;
  }
  for (double& v : theta) v /= sum;
  return sum;
}

}  // namespace

int64_t LatticeSize(const GridSpec& grid) {
  if (grid.k < 1 || grid.resolution < 0) return 0;
  // C(resolution + k - 1, k - 1), computed incrementally so every partial
  // product is itself a binomial coefficient.
  int64_t result = 1;
  for (int i = 1; i < grid.k; ++i) {
    const int64_t factor = grid.resolution + i;
    if (result > std::numeric_limits<int64_t>::max() / factor) {
      return std::numeric_limits<int64_t>::max();
    }
    result = result * factor / i;
  }
  return result;
}

absl::Status ValidateGrid(const GridSpec& grid) {
  if (grid.k < 2 || grid.k > kMaxOracleK) {
    return absl::InvalidArgumentError(absl::StrCat(
        "oracle supports 2 <= k <= ", kMaxOracleK, ", got ", grid.k));
  }
  if (grid.resolution < 1) {
    return absl::InvalidArgumentError("grid resolution must be positive");
  }
  const int64_t size = LatticeSize(grid);
  if (size > kMaxLatticePoints) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "lattice of ", size, " points exceeds the guard of ",
        kMaxLatticePoints));
  }
  return absl::OkStatus();
}

GridSpec DefaultGrid(int k) {
  switch (k) {
    case 2:
      return {2, 2000};
    case 3:
      return {3, 150};
    case 4:
      return {4, 40};
    case 5:
      return {5, 20};
    default:
      return {k, 15};
  }
}

absl::StatusOr<OracleSolution> MleBruteforce(const Distribution& phi,
                                             const RRParams& params,
                                             const GridSpec& grid,
                                             int64_t refine_steps) {
  if (absl::Status st = ValidateGrid(grid); !st.ok()) return st;
  if (phi.k() != grid.k || params.k != grid.k) {
    return absl::InvalidArgumentError("grid, phi and channel must share k");
  }
  ChannelLikelihood objective(phi, params);

  double best_value = std::numeric_limits<double>::infinity();
  std::vector<int> best_point;
  ForEachLatticePoint(grid.k, grid.resolution, [&](const std::vector<int>& m) {
    const double value = objective.Value(ToPoint(m, grid.resolution));
    // Strict comparison plus lexicographic visiting order breaks ties toward
    // the lexicographically smallest point.
    if (value < best_value) {
      best_value = value;
      best_point = m;
    }
  });

  std::vector<double> theta = ToPoint(best_point, grid.resolution);
  std::vector<double> grad;
  int64_t step = 0;
  for (; step < refine_steps; ++step) {
    objective.Gradient(theta, grad);
    const Pair pair = MostViolatingPair(theta, grad);
    if (pair.from < 0 || pair.to == pair.from ||
        pair.violation <= kKktTolerance) {
      break;
    }
    // Exact line search by bisection on the (increasing) directional
    // derivative over delta in [0, theta_from].
    double lo = 0.0;
    double hi = theta[pair.from];
    double delta;
    if (objective.DirectionalDerivative(pair.to, pair.from, hi) <= 0.0) {
      delta = hi;
    } else {
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (objective.DirectionalDerivative(pair.to, pair.from, mid) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      delta = 0.5 * (lo + hi);
    }
    if (delta <= 0.0) break;
    theta[pair.to] += delta;
    theta[pair.from] = delta == theta[pair.from] ? 0.0 : theta[pair.from] - delta;
  }
  Renormalize(theta);

  objective.Gradient(theta, grad);
  double g_min = std::numeric_limits<double>::infinity();
  double weighted = 0.0;
  for (int i = 0; i < grid.k; ++i) {
    g_min = std::min(g_min, grad[i]);
    weighted += theta[i] * grad[i];
  }
  const double nll = objective.Value(theta);
  absl::StatusOr<Distribution> dist = Distribution::Create(std::move(theta));
  if (!dist.ok()) return dist.status();
  return OracleSolution{*std::move(dist), nll, std::max(0.0, weighted - g_min),
                        std::move(best_point), step};
}

absl::StatusOr<Distribution> ProjectionBruteforce(std::span<const double> v,
                                                  const GridSpec& grid,
                                                  int64_t refine_steps) {
  if (absl::Status st = ValidateGrid(grid); !st.ok()) return st;
  if (static_cast<int>(v.size()) != grid.k) {
    return absl::InvalidArgumentError("grid and vector must share k");
  }
  auto distance2 = [&v](std::span<const double> theta) {
    double acc = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      acc += (theta[i] - v[i]) * (theta[i] - v[i]);
    }
    return acc;
  };
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<int> best_point;
  ForEachLatticePoint(grid.k, grid.resolution, [&](const std::vector<int>& m) {
    const double value = distance2(ToPoint(m, grid.resolution));
    if (value < best_value) {
      best_value = value;
      best_point = m;
    }
  });

  std::vector<double> theta = ToPoint(best_point, grid.resolution);
  std::vector<double> grad(grid.k);
  for (int64_t step = 0; step < refine_steps; ++step) {
    for (int i = 0; i < grid.k; ++i) grad[i] = theta[i] - v[i];
    const Pair pair = MostViolatingPair(theta, grad);
    if (pair.from < 0 || pair.to == pair.from ||
        pair.violation <= kKktTolerance) {
      break;
    }
    // The quadratic along e_to - e_from is minimized at half the gradient gap.
    const double delta = std::min(theta[pair.from], 0.5 * pair.violation);
    theta[pair.to] += delta;
    theta[pair.from] = delta == theta[pair.from] ? 0.0 : theta[pair.from] - delta;
  }
  Renormalize(theta);
  return Distribution::Create(std::move(theta));
}

absl::StatusOr<std::vector<std::vector<int>>> NearOptimalLatticePoints(
    const Distribution& phi, const RRParams& params, const GridSpec& grid,
    double slack) {
  if (absl::Status st = ValidateGrid(grid); !st.ok()) return st;
  if (phi.k() != grid.k || params.k != grid.k) {
    return absl::InvalidArgumentError("grid, phi and channel must share k");
  }
  ChannelLikelihood objective(phi, params);
  std::vector<std::pair<double, std::vector<int>>> scored;
  double best = std::numeric_limits<double>::infinity();
  ForEachLatticePoint(grid.k, grid.resolution, [&](const std::vector<int>& m) {
    const double value = objective.Value(ToPoint(m, grid.resolution));
    best = std::min(best, value);
    // Keep a loose superset; filtered once the minimum is known.
    if (value <= best + slack) scored.emplace_back(value, m);
  });
  std::vector<std::vector<int>> out;
  for (auto& [value, m] : scored) {
    if (value <= best + slack) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace ldpfreq::oracle
