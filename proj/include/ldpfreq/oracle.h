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


#ifndef LDPFREQ_ORACLE_H_
#define LDPFREQ_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpfreq/core.h"

// Brute-force reference solvers for small K. Nothing here shares code with
// the estimators: the likelihood is evaluated through an explicit channel
// matrix and optimized numerically.
namespace ldpfreq::oracle {

inline constexpr int kMaxOracleK = 6;
inline constexpr int64_t kMaxLatticePoints = 10'000'000;

// The lattice {theta : theta_i = m_i / resolution, sum m_i = resolution}.
struct GridSpec {
  int k = 0;
  int resolution = 0;
};

// Number of lattice points, C(resolution + k - 1, k - 1), saturating.
int64_t LatticeSize(const GridSpec& grid);

absl::Status ValidateGrid(const GridSpec& grid);

// A grid for k with a few thousand to ~20k points.
GridSpec DefaultGrid(int k);

struct OracleSolution {
  Distribution theta;
  // Per-sample negative log-likelihood at theta.
  double nll = 0.0;
  // Upper bound on nll - (optimal nll), from concavity and the final
  // gradient.
  double certified_gap = 0.0;
  // Best lattice point (integer coordinates) before refinement.
  std::vector<int> lattice_point;
  int64_t refine_steps_used = 0;
};

// Maximizes the RR likelihood by scanning the lattice and then running
// pairwise coordinate ascent from the best lattice point until the KKT
// violation drops below 1e-13 or refine_steps are spent.
absl::StatusOr<OracleSolution> MleBruteforce(const Distribution& phi,
                                             const RRParams& params,
                                             const GridSpec& grid,
                                             int64_t refine_steps = 200000);

// Minimizes ||theta - v||_2 over the simplex: lattice scan then pairwise
// coordinate descent.
absl::StatusOr<Distribution> ProjectionBruteforce(std::span<const double> v,
                                                  const GridSpec& grid,
                                                  int64_t refine_steps = 200000);

// Lattice points whose NLL is within `slack` of the best lattice NLL, in
// lexicographic order.
absl::StatusOr<std::vector<std::vector<int>>> NearOptimalLatticePoints(
    const Distribution& phi, const RRParams& params, const GridSpec& grid,
    double slack);

}  // namespace ldpfreq::oracle

#endif  // LDPFREQ_ORACLE_H_
