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


#include "ldpfreq/harness.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "ldpfreq/estimators.h"
#include "ldpfreq/oracle.h"

namespace ldpfreq {
namespace {

// The system absl keeps its own string_view type.
absl::string_view AbslView(std::string_view s) {
  return absl::string_view(s.data(), s.size());
}

absl::Status ParseError(std::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("parse error: ", AbslView(what)));
}

absl::StatusOr<Histogram> FromCounts(const std::vector<int64_t>& counts) {
  if (counts.size() < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bad length: need at least 2 categories, got ", counts.size()));
  }
  int64_t total = 0;
  std::vector<double> probs(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("negative count ", counts[i], " on entry ", i + 1));
    }
    total += counts[i];
  }
  if (total == 0) return absl::InvalidArgumentError("counts sum to zero");
  for (size_t i = 0; i < counts.size(); ++i) {
    probs[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  absl::StatusOr<Distribution> dist = Distribution::Create(std::move(probs));
  if (!dist.ok()) return dist.status();
  return Histogram{*std::move(dist), total};
}

absl::StatusOr<Histogram> FromProbs(std::vector<double> probs,
                                    std::optional<int64_t> n) {
  if (!n.has_value()) {
    return absl::InvalidArgumentError(
        "probability histograms need an explicit sample size n");
  }
  if (*n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample size must be positive, got ", *n));
  }
  absl::StatusOr<Distribution> dist = Distribution::Create(std::move(probs));
  if (!dist.ok()) return dist.status();
  return Histogram{*std::move(dist), *n};
}

// Non-empty, non-comment lines, trimmed.
std::vector<std::string_view> DataLines(std::string_view text) {
  std::vector<std::string_view> out;
  for (absl::string_view raw : absl::StrSplit(AbslView(text), '\n')) {
    const absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(line.data(), line.size());
  }
  return out;
}

// Mixed-shape random histogram: flat, peaked, sparse, or with ties.
Distribution RandomReportHistogram(int k, Rng& rng) {
  std::vector<double> v(k);
  const int shape = static_cast<int>(rng.UniformInt(4));
  double sum = 0.0;
  for (double& x : v) {
    x = -std::log1p(-rng.UniformDouble());
    if (shape == 1) x = x * x * x;
    if (shape == 2 && rng.UniformDouble() < 0.3) x = 0.0;
    if (shape == 3) x = std::floor(x * 4.0) / 8.0;
    sum += x;
  }
  if (sum == 0.0) {
    v[0] = 1.0;
    sum = 1.0;
  }
  for (double& x : v) x /= sum;
  return *Distribution::Create(std::move(v));
}

}  // namespace

absl::StatusOr<Distribution> ZipfDistribution(const ZipfSpec& spec) {
  if (spec.k < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("zipf needs k >= 2, got ", spec.k));
  }
  if (!(spec.s >= 0.0) || !std::isfinite(spec.s)) {
    return absl::InvalidArgumentError(
        absl::StrCat("zipf exponent must be finite and >= 0, got ", spec.s));
  }
  std::vector<double> w(spec.k);
  for (int i = 0; i < spec.k; ++i) w[i] = std::pow(i + 1.0, -spec.s);
  const double total = StableSum(w);
  for (double& x : w) x /= total;
  return Distribution::CreateInternal(std::move(w));
}

absl::StatusOr<HistogramFormat> ParseHistogramFormat(std::string_view name) {
  if (name == "counts-csv") return HistogramFormat::kCountsCsv;
  if (name == "probs-csv") return HistogramFormat::kProbsCsv;
  if (name == "json") return HistogramFormat::kJson;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown histogram format '", AbslView(name),
                   "' (expected counts-csv, probs-csv or json)"));
}

HistogramFormat GuessHistogramFormat(std::string_view path) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return HistogramFormat::kJson;
  }
  return HistogramFormat::kCountsCsv;
}

absl::StatusOr<Histogram> ParseHistogram(std::string_view text,
                                         HistogramFormat format,
                                         std::optional<int64_t> n) {
  switch (format) {
    case HistogramFormat::kCountsCsv: {
      std::vector<int64_t> counts;
      for (std::string_view line : DataLines(text)) {
        int64_t value = 0;
        const char* end = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(line.data(), end, value);
        if (ec != std::errc() || ptr != end) {
          return ParseError(absl::StrCat("expected an integer count, got '",
                                         AbslView(line), "'"));
        }
        counts.push_back(value);
      }
      return FromCounts(counts);
    }
    case HistogramFormat::kProbsCsv: {
      std::vector<double> probs;
      for (std::string_view line : DataLines(text)) {
        double value = 0.0;
        const char* end = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(line.data(), end, value);
        if (ec != std::errc() || ptr != end) {
          return ParseError(
              absl::StrCat("expected a probability, got '", AbslView(line),
                           "'"));
        }
        probs.push_back(value);
      }
      return FromProbs(std::move(probs), n);
    }
    case HistogramFormat::kJson: {
      nlohmann::json doc = nlohmann::json::parse(text, nullptr,
                                                 /*allow_exceptions=*/false);
      if (doc.is_discarded() || !doc.is_object()) {
        return ParseError("histogram json must be an object");
      }
      if (doc.contains("counts")) {
        const nlohmann::json& arr = doc["counts"];
        if (!arr.is_array()) return ParseError("'counts' must be an array");
        std::vector<int64_t> counts;
        for (const nlohmann::json& c : arr) {
          if (!c.is_number_integer()) {
            return ParseError("'counts' entries must be integers");
          }
          counts.push_back(c.get<int64_t>());
        }
        return FromCounts(counts);
      }
      if (doc.contains("probs")) {
        const nlohmann::json& arr = doc["probs"];
        if (!arr.is_array()) return ParseError("'probs' must be an array");
        std::vector<double> probs;
        for (const nlohmann::json& v : arr) {
          if (!v.is_number()) return ParseError("'probs' entries must be numbers");
          probs.push_back(v.get<double>());
        }
        std::optional<int64_t> file_n;
        if (doc.contains("n")) {
          if (!doc["n"].is_number_integer()) {
            return ParseError("'n' must be an integer");
          }
          file_n = doc["n"].get<int64_t>();
        }
        return FromProbs(std::move(probs), n.has_value() ? n : file_n);
      }
      return ParseError("histogram json needs 'counts' or 'probs'");
    }
  }
  return absl::InternalError("unhandled histogram format");
}

absl::StatusOr<Histogram> IngestHistogram(const std::string& path,
                                          HistogramFormat format,
                                          std::optional<int64_t> n) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<Histogram> h = ParseHistogram(buffer.str(), format, n);
  if (!h.ok()) {
    return absl::Status(h.status().code(),
                        absl::StrCat(path, ": ", h.status().message()));
  }
  return h;
}

absl::StatusOr<std::vector<ConvergencePoint>> RunIbuConvergence(
    const Distribution& phi, const RRParams& params, int64_t max_iters,
    int64_t checkpoint_stride) {
  if (max_iters < 1) {
    return absl::InvalidArgumentError("max_iters must be at least 1");
  }
  if (checkpoint_stride < 1) {
    return absl::InvalidArgumentError("checkpoint stride must be at least 1");
  }
  absl::StatusOr<MleResult> mle = EstimateMle(phi, params);
  if (!mle.ok()) return mle.status();
  absl::StatusOr<RrIbuIterator> it = RrIbuIterator::Create(phi, params);
  if (!it.ok()) return it.status();

  auto error = [&]() {
    double acc = 0.0;
    std::span<const double> theta = it->theta();
    for (int i = 0; i < phi.k(); ++i) {
      const double d = theta[i] - mle->theta[i];
      acc += d * d;
    }
    return acc;
  };
  std::vector<ConvergencePoint> series;
  series.push_back({0, error()});
  while (it->t() < max_iters) {
    it->Step();
    if (it->t() % checkpoint_stride == 0 || it->t() == max_iters) {
      series.push_back({it->t(), error()});
    }
  }
  return series;
}

int CountMonotonicityViolations(const std::vector<ConvergencePoint>& series,
                                int64_t burn_in, double slack) {
  int violations = 0;
  for (size_t i = 1; i < series.size(); ++i) {
    if (series[i - 1].t < burn_in) continue;
    if (series[i].squared_error > series[i - 1].squared_error + slack) {
      ++violations;
    }
  }
  return violations;
}

absl::StatusOr<OracleAgreementReport> RunOracleAgreement(
    const OracleAgreementOptions& options) {
  if (options.trials < 1) {
    return absl::InvalidArgumentError("need at least one trial");
  }
  if (options.min_k < 2 || options.max_k > oracle::kMaxOracleK ||
      options.min_k > options.max_k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "k range must lie within [2, ", oracle::kMaxOracleK, "]"));
  }
  OracleAgreementReport report;
  const Rng root(Seed{options.seed, 0});
  for (int t = 0; t < options.trials; ++t) {
    Rng rng = root.Split(static_cast<uint64_t>(t));
    const int k = options.min_k +
                  static_cast<int>(rng.UniformInt(options.max_k - options.min_k + 1));
    const double eps =
        options.min_epsilon +
        (options.max_epsilon - options.min_epsilon) * rng.UniformDouble();
    absl::StatusOr<RRParams> params = ParamsFromEpsilon(k, eps);
    if (!params.ok()) return params.status();
    const Distribution phi = RandomReportHistogram(k, rng);

    absl::StatusOr<MleResult> mle = EstimateMle(phi, *params);
    if (!mle.ok()) return mle.status();
    absl::StatusOr<oracle::OracleSolution> sol =
        oracle::MleBruteforce(phi, *params, oracle::DefaultGrid(k));
    if (!sol.ok()) return sol.status();

    double linf = 0.0;
    for (int i = 0; i < k; ++i) {
      linf = std::max(linf, std::abs(mle->theta[i] - sol->theta[i]));
    }
    // NLL of the closed form, evaluated the same way as the oracle's.
    double nll = 0.0;
    for (int y = 0; y < k; ++y) {
      if (phi[y] > 0.0) {
        nll -= phi[y] * std::log(params->q +
                                 (params->p - params->q) * mle->theta[y]);
      }
    }
    const double excess = nll - sol->nll;
    report.max_linf = std::max(report.max_linf, linf);
    report.max_nll_excess =
        t == 0 ? excess : std::max(report.max_nll_excess, excess);
    ++report.trials;
    if (linf > options.linf_tolerance || excess > options.nll_slack) {
      ++report.failures;
      report.failure_details.push_back(absl::StrCat(
          "trial ", t, ": k=", k, " eps=", eps, " linf=", linf,
          " nll_excess=", excess));
    }
  }
  return report;
}

}  // namespace ldpfreq
