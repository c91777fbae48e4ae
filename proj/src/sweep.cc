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


#include "ldpfreq/sweep.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>
#include <utility>

#include <nlohmann/json.hpp>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "ldpfreq/estimators.h"
#include "ldpfreq/harness.h"
#include "ldpfreq/mechanism.h"
#include "ldpfreq/metrics.h"

namespace ldpfreq {
namespace {

// The system absl keeps its own string_view type.
absl::string_view AbslView(std::string_view s) {
  return absl::string_view(s.data(), s.size());
}

struct Cell {
  int k;
  double epsilon;
  int64_t n;
  const DistSpec* dist;
};

struct Task {
  const Cell* cell;
  int seed_index;
};

uint64_t HashString(std::string_view s) {
  // FNV-1a.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t CellHash(const Cell& cell) {
  uint64_t h = CombineIds(static_cast<uint64_t>(cell.k),
                          std::bit_cast<uint64_t>(cell.epsilon));
  h = CombineIds(h, static_cast<uint64_t>(cell.n));
  return CombineIds(h, HashString(cell.dist->id));
}

auto SortKey(const SweepRecord& r) {
  return std::tie(r.k, r.epsilon, r.n, r.dist_id, r.seed_index, r.estimator);
}

struct TaskOutput {
  std::vector<SweepRecord> records;
  absl::Status status;
};

absl::Status RunTask(const SweepConfig& config, const Task& task,
                     std::vector<SweepRecord>& out) {
  const Cell& cell = *task.cell;
  absl::StatusOr<RRParams> params = ParamsFromEpsilon(cell.k, cell.epsilon);
  if (!params.ok()) return params.status();
  absl::StatusOr<Distribution> theta =
      cell.dist->histogram.has_value()
          ? absl::StatusOr<Distribution>(*cell.dist->histogram)
          : ZipfDistribution({cell.k, *cell.dist->zipf_s});
  if (!theta.ok()) return theta.status();

  const Seed seed{config.master_seed,
                  CombineIds(CellHash(cell),
                             static_cast<uint64_t>(task.seed_index))};
  absl::StatusOr<SampledData> data =
      SampleDataset(*theta, cell.n, *params, seed);
  if (!data.ok()) return data.status();
  absl::StatusOr<Distribution> phi = EmpiricalHistogram(data->randomized);
  if (!phi.ok()) return phi.status();

  for (EstimatorKind kind : config.estimators) {
    const auto start = std::chrono::steady_clock::now();
    absl::StatusOr<std::vector<double>> estimate;
    switch (kind) {
      case EstimatorKind::kInv:
        estimate = EstimateInv(*phi, *params);
        break;
      case EstimatorKind::kInvN: {
        absl::StatusOr<Distribution> d = EstimateInvN(*phi, *params);
        estimate = d.ok() ? absl::StatusOr<std::vector<double>>(d->vector())
                          : d.status();
        break;
      }
      case EstimatorKind::kInvP: {
        absl::StatusOr<Distribution> d = EstimateInvP(*phi, *params);
        estimate = d.ok() ? absl::StatusOr<std::vector<double>>(d->vector())
                          : d.status();
        break;
      }
      case EstimatorKind::kMle: {
        absl::StatusOr<MleResult> d = EstimateMle(*phi, *params);
        estimate = d.ok()
                       ? absl::StatusOr<std::vector<double>>(d->theta.vector())
                       : d.status();
        break;
      }
      case EstimatorKind::kIbu: {
        absl::StatusOr<IbuState> d =
            EstimateIbuRr(*phi, *params, IbuOptions{.n_iters = config.ibu_iters, .early_stop_tol = std::nullopt});
        estimate = d.ok()
                       ? absl::StatusOr<std::vector<double>>(d->theta.vector())
                       : d.status();
        break;
      }
    }
    const auto stop = std::chrono::steady_clock::now();
    if (!estimate.ok()) return estimate.status();

    SweepRecord record;
    record.k = cell.k;
    record.epsilon = cell.epsilon;
    record.n = cell.n;
    record.dist_id = cell.dist->id;
    record.seed_index = task.seed_index;
    record.estimator = std::string(EstimatorName(kind));
    absl::StatusOr<double> v = Mse(*estimate, *theta);
    if (!v.ok()) return v.status();
    record.mse = *v;
    v = TotalVariation(*estimate, *theta);
    if (!v.ok()) return v.status();
    record.tv = *v;
    v = NegLogLikelihood(*estimate, *phi, *params);
    if (!v.ok()) return v.status();
    record.nll_per_sample = *v;
    if (config.record_timing) {
      record.wall_time_micros =
          std::chrono::duration_cast<std::chrono::microseconds>(stop - start)
              .count();
    }
    out.push_back(std::move(record));
  }
  return absl::OkStatus();
}

absl::Status ConfigError(std::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("sweep config: ", AbslView(what)));
}

template <typename T>
absl::StatusOr<std::vector<T>> ReadNumberList(const nlohmann::json& doc,
                                              const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    return ConfigError(absl::StrCat("'", key, "' must be an array"));
  }
  std::vector<T> out;
  for (const nlohmann::json& v : doc[key]) {
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        return ConfigError(absl::StrCat("'", key, "' entries must be integers"));
      }
    } else if (!v.is_number()) {
      return ConfigError(absl::StrCat("'", key, "' entries must be numbers"));
    }
    out.push_back(v.get<T>());
  }
  return out;
}

}  // namespace

std::string_view EstimatorName(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kIbu:
      return "ibu";
    case EstimatorKind::kInv:
      return "inv";
    case EstimatorKind::kInvN:
      return "invn";
    case EstimatorKind::kInvP:
      return "invp";
    case EstimatorKind::kMle:
      return "mle";
  }
  return "unknown";
}

absl::StatusOr<EstimatorKind> ParseEstimator(std::string_view name) {
  for (EstimatorKind kind :
       {EstimatorKind::kIbu, EstimatorKind::kInv, EstimatorKind::kInvN,
        EstimatorKind::kInvP, EstimatorKind::kMle}) {
    if (name == EstimatorName(kind)) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown estimator '", AbslView(name),
                   "' (expected inv, invn, invp, mle or ibu)"));
}

DistSpec ZipfDistSpec(double s) {
  DistSpec spec;
  spec.id = absl::StrCat("zipf-", FormatDouble(s));
  spec.zipf_s = s;
  return spec;
}

absl::Status ValidateSweepConfig(const SweepConfig& config) {
  if (config.k_values.empty() || config.epsilon_values.empty() ||
      config.n_values.empty() || config.dist_specs.empty() ||
      config.estimators.empty()) {
    return ConfigError("every grid list must be non-empty");
  }
  if (config.n_seeds < 1) return ConfigError("n_seeds must be at least 1");
  if (config.ibu_iters < 0) return ConfigError("ibu_iters must be >= 0");
  for (int k : config.k_values) {
    if (k < 2) return ConfigError(absl::StrCat("k must be >= 2, got ", k));
  }
  for (double eps : config.epsilon_values) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
      return ConfigError(absl::StrCat("epsilon must be positive, got ", eps));
    }
  }
  for (int64_t n : config.n_values) {
    if (n < 1) return ConfigError(absl::StrCat("n must be >= 1, got ", n));
  }
  for (const DistSpec& d : config.dist_specs) {
    if (d.id.empty() || d.id.find_first_of(",\"\n") != std::string::npos) {
      return ConfigError(absl::StrCat("invalid dist id '", d.id, "'"));
    }
    if (d.zipf_s.has_value() == d.histogram.has_value()) {
      return ConfigError("each dist spec needs exactly one of zipf or histogram");
    }
    if (d.zipf_s.has_value() && !(*d.zipf_s >= 0.0)) {
      return ConfigError("zipf exponent must be >= 0");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<SweepConfig> ParseSweepConfig(std::string_view json_text,
                                             const std::string& base_dir) {
  nlohmann::json doc =
      nlohmann::json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return ConfigError("not a JSON object");
  }
  SweepConfig config;
  absl::StatusOr<std::vector<int>> ks = ReadNumberList<int>(doc, "k_values");
  if (!ks.ok()) return ks.status();
  config.k_values = *std::move(ks);
  absl::StatusOr<std::vector<double>> eps =
      ReadNumberList<double>(doc, "epsilon_values");
  if (!eps.ok()) return eps.status();
  config.epsilon_values = *std::move(eps);
  absl::StatusOr<std::vector<int64_t>> ns =
      ReadNumberList<int64_t>(doc, "n_values");
  if (!ns.ok()) return ns.status();
  config.n_values = *std::move(ns);

  if (!doc.contains("dist_specs") || !doc["dist_specs"].is_array()) {
    return ConfigError("'dist_specs' must be an array");
  }
  for (const nlohmann::json& d : doc["dist_specs"]) {
    const std::string type = d.value("type", "zipf");
    if (type == "zipf") {
      if (!d.contains("s") || !d["s"].is_number()) {
        return ConfigError("zipf dist spec needs a numeric 's'");
      }
      DistSpec spec = ZipfDistSpec(d["s"].get<double>());
      if (d.contains("id")) spec.id = d["id"].get<std::string>();
      config.dist_specs.push_back(std::move(spec));
    } else if (type == "histogram") {
      if (!d.contains("path") || !d["path"].is_string()) {
        return ConfigError("histogram dist spec needs a 'path'");
      }
      std::filesystem::path path = d["path"].get<std::string>();
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      absl::StatusOr<HistogramFormat> format =
          d.contains("format")
              ? ParseHistogramFormat(d["format"].get<std::string>())
              : absl::StatusOr<HistogramFormat>(
                    GuessHistogramFormat(path.string()));
      if (!format.ok()) return format.status();
      std::optional<int64_t> n;
      if (d.contains("n")) n = d["n"].get<int64_t>();
      absl::StatusOr<Histogram> h = IngestHistogram(path.string(), *format, n);
      if (!h.ok()) return h.status();
      DistSpec spec;
      spec.id = d.value("id", path.stem().string());
      spec.histogram = h->dist;
      config.dist_specs.push_back(std::move(spec));
    } else {
      return ConfigError(absl::StrCat("unknown dist spec type '", type, "'"));
    }
  }

  if (!doc.contains("estimators") || !doc["estimators"].is_array()) {
    return ConfigError("'estimators' must be an array");
  }
  for (const nlohmann::json& e : doc["estimators"]) {
    if (!e.is_string()) return ConfigError("estimator names must be strings");
    absl::StatusOr<EstimatorKind> kind = ParseEstimator(e.get<std::string>());
    if (!kind.ok()) return kind.status();
    config.estimators.push_back(*kind);
  }
  if (doc.contains("n_seeds")) config.n_seeds = doc["n_seeds"].get<int>();
  if (doc.contains("ibu_iters")) config.ibu_iters = doc["ibu_iters"].get<int64_t>();
  if (doc.contains("master_seed")) {
    config.master_seed = doc["master_seed"].get<uint64_t>();
  }
  if (doc.contains("record_timing")) {
    config.record_timing = doc["record_timing"].get<bool>();
  }
  if (absl::Status st = ValidateSweepConfig(config); !st.ok()) return st;
  return config;
}

absl::StatusOr<SweepConfig> LoadSweepConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseSweepConfig(
      buffer.str(), std::filesystem::path(path).parent_path().string());
}

absl::StatusOr<SweepSummary> RunSweep(
    const SweepConfig& config,
    const std::function<void(const SweepRecord&)>& sink,
    const SweepOptions& options) {
  if (absl::Status st = ValidateSweepConfig(config); !st.ok()) return st;

  std::vector<Cell> cells;
  for (int k : config.k_values) {
    for (double eps : config.epsilon_values) {
      for (int64_t n : config.n_values) {
        for (const DistSpec& dist : config.dist_specs) {
          // A fixed histogram only makes sense at its own domain size.
          if (dist.histogram.has_value() && dist.histogram->k() != k) continue;
          cells.push_back({k, eps, n, &dist});
        }
      }
    }
  }
  std::vector<Task> tasks;
  tasks.reserve(cells.size() * config.n_seeds);
  for (const Cell& cell : cells) {
    for (int s = 0; s < config.n_seeds; ++s) tasks.push_back({&cell, s});
  }

  std::vector<TaskOutput> outputs(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < tasks.size();
         i = next.fetch_add(1)) {
      outputs[i].status = RunTask(config, tasks[i], outputs[i].records);
      if (!outputs[i].status.ok()) outputs[i].records.clear();
    }
  };
  const int threads = std::max(
      1, std::min<int>(options.threads, static_cast<int>(tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  SweepSummary summary;
  summary.cells_run = static_cast<int64_t>(cells.size());
  summary.tasks_run = static_cast<int64_t>(tasks.size());
  std::vector<SweepRecord> records;
  for (size_t i = 0; i < tasks.size(); ++i) {
    if (!outputs[i].status.ok()) {
      ++summary.failures;
      const Task& task = tasks[i];
      summary.errors.push_back(absl::StrCat(
          "k=", task.cell->k, " epsilon=", FormatDouble(task.cell->epsilon),
          " n=", task.cell->n, " dist=", task.cell->dist->id,
          " seed=", task.seed_index, ": ", outputs[i].status.message()));
    }
    for (SweepRecord& r : outputs[i].records) records.push_back(std::move(r));
  }
  std::sort(records.begin(), records.end(),
            [](const SweepRecord& a, const SweepRecord& b) {
              return SortKey(a) < SortKey(b);
            });
  summary.records = static_cast<int64_t>(records.size());
  for (const SweepRecord& r : records) sink(r);
  return summary;
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string SweepCsvRow(const SweepRecord& r) {
  return absl::StrCat(r.k, ",", FormatDouble(r.epsilon), ",", r.n, ",",
                      r.dist_id, ",", r.seed_index, ",", r.estimator, ",",
                      FormatDouble(r.mse), ",", FormatDouble(r.tv), ",",
                      FormatDouble(r.nll_per_sample), ",",
                      r.wall_time_micros);
}

int ThreadsFromEnv(int fallback) {
  const char* env = std::getenv("LDPFREQ_THREADS");
  if (env == nullptr) return fallback;
  int value = 0;
  const std::string_view s(env);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 1) {
    return fallback;
  }
  return value;
}

}  // namespace ldpfreq
