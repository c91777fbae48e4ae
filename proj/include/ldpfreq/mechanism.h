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


#ifndef LDPFREQ_MECHANISM_H_
#define LDPFREQ_MECHANISM_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpfreq/core.h"

namespace ldpfreq {

// Largest K for which RrChannel builds a dense K x K matrix by default.
inline constexpr int kMaxDenseChannelK = 4096;

// Row-stochastic transition matrix C(i, j) = Pr(report j | input i).
class ChannelMatrix {
 public:
  ChannelMatrix(int rows, int cols) : rows_(rows), cols_(cols),
                                      data_(static_cast<size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double operator()(int i, int j) const {
    return data_[static_cast<size_t>(i) * cols_ + j];
  }
  double& operator()(int i, int j) {
    return data_[static_cast<size_t>(i) * cols_ + j];
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
};

// Applies randomized response to one report x in [0, k): keeps x with
// probability p - q, otherwise reports a uniform category (possibly x).
absl::StatusOr<int> Randomize(int x, const RRParams& params, Rng& rng);

struct SampledData {
  Dataset truth;
  Dataset randomized;
};

// Draws n i.i.d. inputs from theta and randomizes each one. Users are
// processed in fixed blocks with one derived stream per block, so the output
// depends only on (theta, n, params, seed).
absl::StatusOr<SampledData> SampleDataset(const Distribution& theta, int64_t n,
                                          const RRParams& params,
                                          const Seed& seed);

// Per-category counts of a dataset.
absl::StatusOr<std::vector<int64_t>> HistogramCounts(const Dataset& data);

// Normalized histogram phi_i = count(i) / N.
absl::StatusOr<Distribution> EmpiricalHistogram(const Dataset& data);

// Normalizes nonnegative counts with a positive total.
absl::StatusOr<Distribution> DistributionFromCounts(
    const std::vector<int64_t>& counts);

// Expected report distribution M(theta)_i = q + (p - q) theta_i.
absl::StatusOr<Distribution> CompoundDistribution(const Distribution& theta,
                                                  const RRParams& params);

// Dense RR channel: p on the diagonal, q elsewhere. Refuses k above
// kMaxDenseChannelK unless allow_large is set.
absl::StatusOr<ChannelMatrix> RrChannel(const RRParams& params,
                                        bool allow_large = false);

}  // namespace ldpfreq

#endif  // LDPFREQ_MECHANISM_H_
