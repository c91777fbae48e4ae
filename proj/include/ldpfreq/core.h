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

#ifndef LDPFREQ_CORE_H_
#define LDPFREQ_CORE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace ldpfreq {

// Tolerance on |sum - 1| for vectors supplied by users (files, CLI).
inline constexpr double kUserSumTolerance = 1e-9;
// Tolerance on |sum - 1| for vectors built by the library itself.
inline constexpr double kInternalSumTolerance = 1e-12;
// Entries in [-kClampTolerance, 0) are treated as rounding noise and set to 0.
inline constexpr double kClampTolerance = 1e-12;

// Compensated (Neumaier) summation.
double StableSum(std::span<const double> values);

// A point on the probability simplex over K >= 2 categories. Immutable once
// constructed; the only way to obtain one is through validation.
class Distribution {
 public:
  // Validates user-supplied probabilities: clamps entries in [-1e-12, 0) to 0,
  // rejects larger negatives, rejects |sum - 1| > 1e-9 and renormalizes
  // otherwise.
  static absl::StatusOr<Distribution> Create(std::vector<double> probs);

  // Same checks with the tighter internal sum tolerance.
  static absl::StatusOr<Distribution> CreateInternal(std::vector<double> probs);

  // Uniform distribution over k categories. Requires k >= 2.
  static Distribution Uniform(int k);

  int k() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vector() const { return probs_; }

 private:
  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {}
  static absl::StatusOr<Distribution> CreateWithTolerance(
      std::vector<double> probs, double sum_tolerance);

  std::vector<double> probs_;
};

// Parameters of the K-ary randomized response channel: the true category is
// reported with probability p and each of the K-1 others with probability q.
struct RRParams {
  int k = 0;
  double epsilon = 0.0;
  double p = 0.0;
  double q = 0.0;
};

// p = e^eps / (e^eps + K - 1), q = 1 / (e^eps + K - 1).
absl::StatusOr<RRParams> ParamsFromEpsilon(int k, double epsilon);

// Direct parameterization by the truth probability p; q = (1 - p) / (K - 1).
// Requires p > q, i.e. p > 1/K. p = 1 gives the noiseless channel (eps = inf).
absl::StatusOr<RRParams> ParamsFromP(int k, double p);

// A collection of category reports, 0-based indices in [0, k).
struct Dataset {
  int k = 0;
  std::vector<int32_t> values;

  int64_t n() const { return static_cast<int64_t>(values.size()); }
};

absl::Status ValidateDataset(const Dataset& data);

// Keys a random stream. Equal seeds give bit-identical streams.
struct Seed {
  uint64_t master_seed = 0;
  uint64_t stream_id = 0;

  friend bool operator==(const Seed&, const Seed&) = default;
};

// Counter-based 64-bit generator keyed by a Seed. The i-th output is a pure
// function of (key, i), so streams can be derived and split without any
// shared state. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(const Seed& seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~uint64_t{0}; }

  result_type operator()();

  // Uniform double in [0, 1) with 53 random bits.
  double UniformDouble();
  // Uniform integer in [0, n). Requires n > 0. Exact (rejection based).
  uint64_t UniformInt(uint64_t n);

  // A generator for an independent child stream.
  Rng Split(uint64_t child_id) const;

  uint64_t counter() const { return counter_; }

 private:
  Rng(uint64_t key, uint64_t counter) : key_(key), counter_(counter) {}

  uint64_t key_;
  uint64_t counter_;
};

// Mixes a 64-bit word (SplitMix64 finalizer).
uint64_t Mix64(uint64_t x);
// Combines two words into a well-mixed stream identifier.
uint64_t CombineIds(uint64_t a, uint64_t b);

}  // namespace ldpfreq

#endif  // LDPFREQ_CORE_H_
