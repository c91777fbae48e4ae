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


#include "ldpfreq/mechanism.h"

#include <algorithm>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace ldpfreq {
namespace {

constexpr int64_t kUsersPerBlock = int64_t{1} << 16;

int RandomizeUnchecked(int x, const RRParams& params, Rng& rng) {
  const double keep = params.p - params.q;
  if (rng.UniformDouble() < keep) return x;
  return static_cast<int>(rng.UniformInt(static_cast<uint64_t>(params.k)));
}

// Walker/Vose alias table for O(1) categorical draws.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> probs)
      : accept_(probs.size()), alias_(probs.size()) {
    const int k = static_cast<int>(probs.size());
    std::vector<double> scaled(k);
    std::vector<int> small;
    std::vector<int> large;
    for (int i = 0; i < k; ++i) {
      scaled[i] = probs[i] * k;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const int s = small.back();
      small.pop_back();
      const int l = large.back();
      accept_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (int i : large) {
      accept_[i] = 1.0;
      alias_[i] = i;
    }
    // Leftovers in `small` are rounding residue.
    for (int i : small) {
      accept_[i] = 1.0;
      alias_[i] = i;
    }
  }

  int Draw(Rng& rng) const {
    const int column = static_cast<int>(rng.UniformInt(accept_.size()));
    return rng.UniformDouble() < accept_[column] ? column : alias_[column];
  }

 private:
  std::vector<double> accept_;
  std::vector<int> alias_;
};

}  // namespace

absl::StatusOr<int> Randomize(int x, const RRParams& params, Rng& rng) {
  if (x < 0 || x >= params.k) {
    return absl::OutOfRangeError(
        absl::StrCat("input ", x, " outside [0, ", params.k, ")"));
  }
  return RandomizeUnchecked(x, params, rng);
}

absl::StatusOr<SampledData> SampleDataset(const Distribution& theta, int64_t n,
                                          const RRParams& params,
                                          const Seed& seed) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least one user, got n=", n));
  }
  if (theta.k() != params.k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: theta has ", theta.k(), " categories, channel ",
        params.k));
  }
  const AliasTable table(theta.probs());
  SampledData out;
  out.truth.k = params.k;
  out.randomized.k = params.k;
  out.truth.values.resize(n);
  out.randomized.values.resize(n);
  const Rng root(seed);
  for (int64_t begin = 0, block = 0; begin < n;
       begin += kUsersPerBlock, ++block) {
    Rng rng = root.Split(static_cast<uint64_t>(block));
    const int64_t end = std::min(n, begin + kUsersPerBlock);
    for (int64_t u = begin; u < end; ++u) {
      const int x = table.Draw(rng);
      out.truth.values[u] = x;
      out.randomized.values[u] = RandomizeUnchecked(x, params, rng);
    }
  }
  return out;
}

absl::StatusOr<std::vector<int64_t>> HistogramCounts(const Dataset& data) {
  if (absl::Status status = ValidateDataset(data); !status.ok()) return status;
  std::vector<int64_t> counts(data.k, 0);
  for (int32_t v : data.values) ++counts[v];
  return counts;
}

absl::StatusOr<Distribution> EmpiricalHistogram(const Dataset& data) {
  absl::StatusOr<std::vector<int64_t>> counts = HistogramCounts(data);
  if (!counts.ok()) return counts.status();
  return DistributionFromCounts(*counts);
}

absl::StatusOr<Distribution> DistributionFromCounts(
    const std::vector<int64_t>& counts) {
  int64_t total = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("negative count ", counts[i], " at index ", i));
    }
    total += counts[i];
  }
  if (total == 0) {
    return absl::InvalidArgumentError("counts sum to zero");
  }
  std::vector<double> probs(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) {
    probs[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return Distribution::CreateInternal(std::move(probs));
}

absl::StatusOr<Distribution> CompoundDistribution(const Distribution& theta,
                                                  const RRParams& params) {
  if (theta.k() != params.k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: theta has ", theta.k(), " categories, channel ",
        params.k));
  }
  const double d = params.p - params.q;
  std::vector<double> out(theta.k());
  for (int i = 0; i < theta.k(); ++i) out[i] = params.q + d * theta[i];
  return Distribution::CreateInternal(std::move(out));
}

absl::StatusOr<ChannelMatrix> RrChannel(const RRParams& params,
                                        bool allow_large) {
  if (params.k > kMaxDenseChannelK && !allow_large) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "dense channel for k=", params.k, " exceeds the ", kMaxDenseChannelK,
        " guard"));
  }
  ChannelMatrix c(params.k, params.k);
  for (int i = 0; i < params.k; ++i) {
    for (int j = 0; j < params.k; ++j) c(i, j) = i == j ? params.p : params.q;
  }
  return c;
}

}  // namespace ldpfreq
