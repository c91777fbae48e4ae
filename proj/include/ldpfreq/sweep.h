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


#ifndef LDPFREQ_SWEEP_H_
#define LDPFREQ_SWEEP_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpfreq/core.h"

namespace ldpfreq {

enum class EstimatorKind { kIbu, kInv, kInvN, kInvP, kMle };

std::string_view EstimatorName(EstimatorKind kind);
absl::StatusOr<EstimatorKind> ParseEstimator(std::string_view name);

// One input distribution of a sweep: either Zipf(s) at each k of the grid,
// or a fixed histogram that only runs at its own k.
struct DistSpec {
  std::string id;
  std::optional<double> zipf_s;
  std::optional<Distribution> histogram;
};

DistSpec ZipfDistSpec(double s);

struct SweepConfig {
  std::vector<int> k_values;
  std::vector<double> epsilon_values;
  std::vector<int64_t> n_values;
  std::vector<DistSpec> dist_specs;
  std::vector<EstimatorKind> estimators;
  int n_seeds = 50;
  int64_t ibu_iters = 40000;
  uint64_t master_seed = 0;
  // Wall-clock timings make the CSV non-reproducible, so they are opt-in;
  // otherwise wall_time_micros is written as 0.
  bool record_timing = false;
};

absl::Status ValidateSweepConfig(const SweepConfig& config);

// Parses the JSON form of a SweepConfig. Histogram paths are resolved
// relative to base_dir.
//
//   {"k_values": [50, 100], "epsilon_values": [1, 2], "n_values": [1000],
//    "dist_specs": [{"type": "zipf", "s": 1.3},
//                   {"type": "histogram", "path": "h.csv",
//                    "format": "counts-csv", "id": "kosarak"}],
//    "estimators": ["inv", "invn", "invp", "mle", "ibu"],
//    "n_seeds": 50, "ibu_iters": 40000, "master_seed": 7,
//    "record_timing": false}
absl::StatusOr<SweepConfig> ParseSweepConfig(std::string_view json_text,
                                             const std::string& base_dir);
absl::StatusOr<SweepConfig> LoadSweepConfig(const std::string& path);

struct SweepRecord {
  int k = 0;
  double epsilon = 0.0;
  int64_t n = 0;
  std::string dist_id;
  int seed_index = 0;
  std::string estimator;
  double mse = 0.0;
  double tv = 0.0;
  double nll_per_sample = 0.0;
  int64_t wall_time_micros = 0;
};

struct SweepSummary {
  int64_t cells_run = 0;
  int64_t tasks_run = 0;
  int64_t records = 0;
  int failures = 0;
  std::vector<std::string> errors;
};

struct SweepOptions {
  int threads = 1;
};

// Runs every (k, epsilon, n, dist, seed) task, each on its own random stream
// derived from (master_seed, cell, seed index). Records reach the sink on
// the calling thread, sorted by (k, epsilon, n, dist_id, seed_index,
// estimator), so the output does not depend on the thread count. A failing
// task is reported in the summary and the sweep carries on.
absl::StatusOr<SweepSummary> RunSweep(
    const SweepConfig& config,
    const std::function<void(const SweepRecord&)>& sink,
    const SweepOptions& options = {});

inline constexpr std::string_view kSweepCsvHeader =
    "k,epsilon,n,dist_id,seed_index,estimator,mse,tv,nll_per_sample,"
    "wall_time_micros";

// Shortest decimal that parses back to the same double.
std::string FormatDouble(double value);

std::string SweepCsvRow(const SweepRecord& record);

// Thread count from LDPFREQ_THREADS, or `fallback` when unset or invalid.
int ThreadsFromEnv(int fallback);

}  // namespace ldpfreq

#endif  // LDPFREQ_SWEEP_H_
