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


#include "ldpfreq/core.h"

#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace ldpfreq {

double StableSum(std::span<const double> values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

absl::StatusOr<Distribution> Distribution::Create(std::vector<double> probs) {
  return CreateWithTolerance(std::move(probs), kUserSumTolerance);
}

absl::StatusOr<Distribution> Distribution::CreateInternal(
    std::vector<double> probs) {
  return CreateWithTolerance(std::move(probs), kInternalSumTolerance);
}

absl::StatusOr<Distribution> Distribution::CreateWithTolerance(
    std::vector<double> probs, double sum_tolerance) {
  if (probs.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad length: need at least 2 categories, got ",
                     probs.size()));
  }
  for (size_t i = 0; i < probs.size(); ++i) {
    double& v = probs[i];
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("non-finite entry at index ", i));
    }
    if (v < 0.0) {
      if (v < -kClampTolerance) {
        return absl::InvalidArgumentError(
            absl::StrCat("negative entry ", v, " at index ", i));
      }
      v = 0.0;
    }
  }
  const double sum = StableSum(probs);
  if (std::abs(sum - 1.0) > sum_tolerance) {
    return absl::InvalidArgumentError(
        absl::StrFormat("bad sum: entries sum to 1%+.3g", sum - 1.0));
  }
  if (sum != 1.0) {
    for (double& v : probs) v /= sum;
  }
  return Distribution(std::move(probs));
}

Distribution Distribution::Uniform(int k) {
  return Distribution(std::vector<double>(k, 1.0 / k));
}

absl::StatusOr<RRParams> ParamsFromEpsilon(int k, double epsilon) {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("k must be at least 2, got ", k));
  }
  if (!std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be finite");
  }
  if (epsilon <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  // Dividing through by e^eps keeps large epsilon from overflowing.
  const double inv = std::exp(-epsilon);
  const double denom = 1.0 + (k - 1) * inv;
  RRParams params;
  params.k = k;
  params.epsilon = epsilon;
  params.p = 1.0 / denom;
  // Algebraically (1 - p) / (k - 1); this form avoids cancellation in 1 - p
  // when p is close to 1.
  params.q = inv / denom;
  return params;
}

absl::StatusOr<RRParams> ParamsFromP(int k, double p) {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("k must be at least 2, got ", k));
  }
  if (!(p > 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must lie in (0, 1], got ", p));
  }
  RRParams params;
  params.k = k;
  params.p = p;
  params.q = (1.0 - p) / (k - 1);
  if (!(params.p > params.q)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must exceed q = (1-p)/(k-1); got p=", p));
  }
  params.epsilon = params.q > 0.0 ? std::log(params.p / params.q)
                                  : std::numeric_limits<double>::infinity();
  return params;
}

absl::Status ValidateDataset(const Dataset& data) {
  if (data.k < 2) {
    return absl::InvalidArgumentError("dataset needs k >= 2");
  }
  if (data.values.empty()) {
    return absl::InvalidArgumentError("dataset is empty");
  }
  for (size_t i = 0; i < data.values.size(); ++i) {
    if (data.values[i] < 0 || data.values[i] >= data.k) {
      return absl::OutOfRangeError(absl::StrCat(
          "value ", data.values[i], " at position ", i, " outside [0, ",
          data.k, ")"));
    }
  }
  return absl::OkStatus();
}

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t CombineIds(uint64_t a, uint64_t b) {
  return Mix64(Mix64(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

Rng::Rng(const Seed& seed)
    : key_(CombineIds(seed.master_seed, seed.stream_id)), counter_(0) {}

uint64_t Rng::operator()() {
  // Two rounds of mixing over (key, counter) decorrelate adjacent counters
  // and adjacent keys.
  const uint64_t c = counter_++;
  return Mix64(Mix64(c ^ key_) + key_);
}

double Rng::UniformDouble() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

uint64_t Rng::UniformInt(uint64_t n) {
  // Lemire's nearly divisionless method.
  uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  uint64_t low = static_cast<uint64_t>(m);
  if (low < n) {
    const uint64_t threshold = -n % n;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

Rng Rng::Split(uint64_t child_id) const {
  return Rng(CombineIds(key_, child_id), 0);
}

}  // namespace ldpfreq
