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


#include "ldpfreq/cli.h"

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ldpfreq/core.h"
#include "ldpfreq/estimators.h"
#include "ldpfreq/harness.h"
#include "ldpfreq/mechanism.h"
#include "ldpfreq/metrics.h"
#include "ldpfreq/sweep.h"

namespace ldpfreq {
namespace {

// Channel flags shared by several subcommands; exactly one is set.
struct ChannelFlags {
  std::optional<double> epsilon;
  std::optional<double> p;
};

void AddChannelFlags(CLI::App& cmd, ChannelFlags& flags) {
  CLI::Option* eps = cmd.add_option("--epsilon", flags.epsilon,
                                    "privacy budget; derives p and q");
  CLI::Option* p =
      cmd.add_option("--p", flags.p, "probability of reporting the true value");
  eps->excludes(p);
  p->excludes(eps);
}

absl::StatusOr<RRParams> ResolveParams(const ChannelFlags& flags, int k) {
  if (flags.epsilon.has_value()) return ParamsFromEpsilon(k, *flags.epsilon);
  if (flags.p.has_value()) return ParamsFromP(k, *flags.p);
  return absl::InvalidArgumentError("one of --epsilon or --p is required");
}

// Writes `text` to `path`, or to `out` when the path is empty.
absl::Status Emit(const std::string& path, const std::string& text,
                  std::ostream& out) {
  if (path.empty()) {
    out << text;
    return absl::OkStatus();
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) return absl::NotFoundError("cannot open " + path);
  file << text;
  file.close();
  if (!file) return absl::DataLossError("write failed for " + path);
  return absl::OkStatus();
}

int DataError(const absl::Status& status, std::ostream& err) {
  err << "error: " << status.message() << "\n";
  return kExitData;
}

absl::StatusOr<Histogram> LoadInput(const std::string& path,
                                    const std::string& format,
                                    std::optional<int64_t> n) {
  absl::StatusOr<HistogramFormat> fmt =
      format.empty() ? absl::StatusOr<HistogramFormat>(
                           GuessHistogramFormat(path))
                     : ParseHistogramFormat(format);
  if (!fmt.ok()) return fmt.status();
  return IngestHistogram(path, *fmt, n);
}

// ---------------------------------------------------------------- estimate

struct EstimateFlags {
  std::string input;
  std::string format;
  std::optional<int64_t> n;
  ChannelFlags channel;
  std::string method = "all";
  bool trace = false;
  int64_t ibu_iters = kDefaultIbuIterations;
  std::string out_path;
};

absl::StatusOr<std::vector<double>> RunEstimator(EstimatorKind kind,
                                                 const Distribution& phi,
                                                 const RRParams& params,
                                                 int64_t ibu_iters) {
  switch (kind) {
    case EstimatorKind::kInv:
      return EstimateInv(phi, params);
    case EstimatorKind::kInvN: {
      absl::StatusOr<Distribution> d = EstimateInvN(phi, params);
      if (!d.ok()) return d.status();
      return d->vector();
    }
    case EstimatorKind::kInvP: {
      absl::StatusOr<Distribution> d = EstimateInvP(phi, params);
      if (!d.ok()) return d.status();
      return d->vector();
    }
    case EstimatorKind::kMle: {
      absl::StatusOr<MleResult> d = EstimateMle(phi, params);
      if (!d.ok()) return d.status();
      return d->theta.vector();
    }
    case EstimatorKind::kIbu: {
      absl::StatusOr<IbuState> d =
          EstimateIbuRr(phi, params, IbuOptions{.n_iters = ibu_iters, .early_stop_tol = std::nullopt});
      if (!d.ok()) return d.status();
      return d->theta.vector();
    }
  }
  return absl::InternalError("unhandled estimator");
}

nlohmann::json TraceJson(const MleTrace& trace) {
  return {{"n_zeros", trace.n_zeros},
          {"tau_star", trace.tau_star},
          {"lambda", trace.lambda},
          {"c_tau", trace.c_tau},
          {"g_at_n", trace.g_at_n},
          {"sigma", trace.sigma}};
}

int RunEstimate(const EstimateFlags& flags, std::ostream& out,
                std::ostream& err) {
  absl::StatusOr<Histogram> input = LoadInput(flags.input, flags.format, flags.n);
  if (!input.ok()) return DataError(input.status(), err);
  absl::StatusOr<RRParams> params = ResolveParams(flags.channel, input->dist.k());
  if (!params.ok()) return DataError(params.status(), err);

  std::vector<EstimatorKind> kinds;
  if (flags.method == "all") {
    kinds = {EstimatorKind::kInv, EstimatorKind::kInvN, EstimatorKind::kInvP,
             EstimatorKind::kMle, EstimatorKind::kIbu};
  } else {
    kinds = {*ParseEstimator(flags.method)};
  }

  nlohmann::json doc;
  doc["k"] = params->k;
  doc["n"] = input->n;
  doc["epsilon"] = params->epsilon;
  doc["p"] = params->p;
  doc["q"] = params->q;
  for (EstimatorKind kind : kinds) {
    absl::StatusOr<std::vector<double>> theta =
        RunEstimator(kind, input->dist, *params, flags.ibu_iters);
    if (!theta.ok()) return DataError(theta.status(), err);
    absl::StatusOr<double> nll = NegLogLikelihood(*theta, input->dist, *params);
    if (!nll.ok()) return DataError(nll.status(), err);
    if (kinds.size() == 1) {
      doc["method"] = std::string(EstimatorName(kind));
      doc["theta"] = *theta;
      doc["nll_per_sample"] = *nll;
    } else {
      doc["estimates"][std::string(EstimatorName(kind))] = {
          {"theta", *theta}, {"nll_per_sample", *nll}};
    }
  }
  const bool wants_trace =
      flags.trace && std::find(kinds.begin(), kinds.end(),
                               EstimatorKind::kMle) != kinds.end();
  if (wants_trace) {
    absl::StatusOr<MleResult> mle = EstimateMle(input->dist, *params);
    if (!mle.ok()) return DataError(mle.status(), err);
    doc["trace"] = TraceJson(mle->trace);
  }
  if (absl::Status st = Emit(flags.out_path, doc.dump(2) + "\n", out);
      !st.ok()) {
    return DataError(st, err);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateFlags {
  std::optional<double> zipf_s;
  int k = 0;
  std::string theta_path;
  std::string theta_format;
  int64_t n = 0;
  ChannelFlags channel;
  uint64_t seed = 0;
  uint64_t stream = 0;
  std::string output = "histogram";
  std::string out_path;
  std::string truth_out;
};

std::string CountsText(const std::vector<int64_t>& counts) {
  std::string text;
  for (int64_t c : counts) text += std::to_string(c) + "\n";
  return text;
}

int RunSimulate(const SimulateFlags& flags, std::ostream& out,
                std::ostream& err) {
  absl::StatusOr<Distribution> theta =
      absl::InvalidArgumentError("one of --zipf or --theta is required");
  if (flags.zipf_s.has_value()) {
    theta = ZipfDistribution({flags.k, *flags.zipf_s});
  } else if (!flags.theta_path.empty()) {
    // The sample size of a theta file is irrelevant here.
    absl::StatusOr<Histogram> h =
        LoadInput(flags.theta_path, flags.theta_format, int64_t{1});
    theta = h.ok() ? absl::StatusOr<Distribution>(h->dist) : h.status();
  }
  if (!theta.ok()) return DataError(theta.status(), err);
  absl::StatusOr<RRParams> params = ResolveParams(flags.channel, theta->k());
  if (!params.ok()) return DataError(params.status(), err);
  absl::StatusOr<SampledData> data =
      SampleDataset(*theta, flags.n, *params, {flags.seed, flags.stream});
  if (!data.ok()) return DataError(data.status(), err);

  std::string text;
  if (flags.output == "dataset") {
    text.reserve(data->randomized.values.size() * 4);
    for (int32_t v : data->randomized.values) {
      text += std::to_string(v + 1) + "\n";
    }
  } else {
    absl::StatusOr<std::vector<int64_t>> counts =
        HistogramCounts(data->randomized);
    if (!counts.ok()) return DataError(counts.status(), err);
    text = CountsText(*counts);
  }
  if (absl::Status st = Emit(flags.out_path, text, out); !st.ok()) {
    return DataError(st, err);
  }
  if (!flags.truth_out.empty()) {
    absl::StatusOr<std::vector<int64_t>> counts = HistogramCounts(data->truth);
    if (!counts.ok()) return DataError(counts.status(), err);
    if (absl::Status st = Emit(flags.truth_out, CountsText(*counts), out);
        !st.ok()) {
      return DataError(st, err);
    }
  }
  return kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepFlags {
  std::string config_path;
  std::string out_path;
  std::optional<int> threads;
  bool timing = false;
};

int RunSweepCommand(const SweepFlags& flags, std::ostream& out,
                    std::ostream& err) {
  absl::StatusOr<SweepConfig> config = LoadSweepConfig(flags.config_path);
  if (!config.ok()) return DataError(config.status(), err);
  if (flags.timing) config->record_timing = true;
  const int hardware =
      std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  const int threads = flags.threads.value_or(ThreadsFromEnv(hardware));

  std::string csv(kSweepCsvHeader);
  csv += "\n";
  absl::StatusOr<SweepSummary> summary = RunSweep(
      *config,
      [&csv](const SweepRecord& r) {
        csv += SweepCsvRow(r);
        csv += "\n";
      },
      {.threads = threads});
  if (!summary.ok()) return DataError(summary.status(), err);
  if (absl::Status st = Emit(flags.out_path, csv, out); !st.ok()) {
    return DataError(st, err);
  }
  err << "sweep: " << summary->cells_run << " cells, " << summary->tasks_run
      << " tasks, " << summary->records << " records, " << summary->failures
      << " failures\n";
  for (const std::string& e : summary->errors) err << "  " << e << "\n";
  return summary->failures == 0 ? kExitOk : kExitData;
}

// --------------------------------------------------------- ibu-convergence

struct ConvergenceFlags {
  std::string input;
  std::string format;
  std::optional<double> zipf_s;
  int k = 0;
  int64_t n = 0;
  uint64_t seed = 0;
  ChannelFlags channel;
  int64_t max_iters = kDefaultIbuIterations;
  int64_t stride = 100;
  std::string label;
  std::string out_path;
};

inline constexpr std::string_view kConvergenceCsvHeader =
    "series,iteration,sq_error";

int RunConvergenceCommand(const ConvergenceFlags& flags, std::ostream& out,
                          std::ostream& err) {
  absl::StatusOr<Distribution> phi =
      absl::InvalidArgumentError("one of --input or --zipf is required");
  int k = 0;
  if (!flags.input.empty()) {
    absl::StatusOr<Histogram> h = LoadInput(flags.input, flags.format, flags.n > 0
                                                ? std::optional<int64_t>(flags.n)
                                                : std::nullopt);
    if (!h.ok()) return DataError(h.status(), err);
    phi = h->dist;
    k = h->dist.k();
  } else if (flags.zipf_s.has_value()) {
    k = flags.k;
  }
  absl::StatusOr<RRParams> params = ResolveParams(flags.channel, k);
  if (flags.input.empty() && flags.zipf_s.has_value() && params.ok()) {
    absl::StatusOr<Distribution> theta =
        ZipfDistribution({flags.k, *flags.zipf_s});
    if (!theta.ok()) return DataError(theta.status(), err);
    absl::StatusOr<SampledData> data =
        SampleDataset(*theta, flags.n, *params, {flags.seed, 0});
    if (!data.ok()) return DataError(data.status(), err);
    phi = EmpiricalHistogram(data->randomized);
  }
  if (!phi.ok()) return DataError(phi.status(), err);
  if (!params.ok()) return DataError(params.status(), err);

  absl::StatusOr<std::vector<ConvergencePoint>> series =
      RunIbuConvergence(*phi, *params, flags.max_iters, flags.stride);
  if (!series.ok()) return DataError(series.status(), err);
  const std::string label = flags.label.empty() ? "ibu" : flags.label;
  std::string csv(kConvergenceCsvHeader);
  csv += "\n";
  for (const ConvergencePoint& pt : *series) {
    csv += label + "," + std::to_string(pt.t) + "," +
           FormatDouble(pt.squared_error) + "\n";
  }
  if (absl::Status st = Emit(flags.out_path, csv, out); !st.ok()) {
    return DataError(st, err);
  }
  const int violations = CountMonotonicityViolations(*series, 10, 1e-12);
  if (violations > 0) {
    err << "note: squared error rose at " << violations
        << " checkpoints after t=10\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------------ verify

int RunVerify(const OracleAgreementOptions& options, std::ostream& out,
              std::ostream& err) {
  absl::StatusOr<OracleAgreementReport> report = RunOracleAgreement(options);
  if (!report.ok()) return DataError(report.status(), err);
  out << "trials " << report->trials << ", failures " << report->failures
      << ", max linf " << FormatDouble(report->max_linf)
      << ", max nll excess " << FormatDouble(report->max_nll_excess) << "\n";
  for (const std::string& d : report->failure_details) out << "  " << d << "\n";
  out << (report->ok() ? "OK" : "FAILED") << "\n";
  return report->ok() ? kExitOk : kExitData;
}

}  // namespace

int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Frequency estimation under randomized response", "ldpfreq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ldpfreq 0.1.0");

  const std::vector<std::string> methods = {"all", "inv", "invn", "invp",
                                            "mle", "ibu"};
  const std::vector<std::string> formats = {"counts-csv", "probs-csv", "json"};

  EstimateFlags est;
  CLI::App* estimate =
      app.add_subcommand("estimate", "estimate a histogram from noisy reports");
  estimate->add_option("--input", est.input, "report histogram file")
      ->required();
  estimate->add_option("--format", est.format, "histogram format")
      ->check(CLI::IsMember(formats));
  estimate->add_option("--n", est.n, "sample size for probability inputs");
  AddChannelFlags(*estimate, est.channel);
  estimate->add_option("--method", est.method, "estimator or 'all'")
      ->check(CLI::IsMember(methods));
  estimate->add_flag("--trace", est.trace, "include the MLE trace");
  estimate->add_option("--ibu-iters", est.ibu_iters, "IBU iterations")
      ->check(CLI::NonNegativeNumber);
  estimate->add_option("--out", est.out_path, "output file (default stdout)");

  SimulateFlags sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "sample true values and randomize them");
  CLI::Option* zipf =
      simulate->add_option("--zipf", sim.zipf_s, "Zipf exponent s");
  CLI::Option* sim_k = simulate->add_option("--k", sim.k, "domain size");
  CLI::Option* theta_opt =
      simulate->add_option("--theta", sim.theta_path, "true histogram file");
  simulate->add_option("--theta-format", sim.theta_format,
                       "format of the --theta file")
      ->check(CLI::IsMember(formats));
  zipf->excludes(theta_opt)->needs(sim_k);
  theta_opt->excludes(zipf);
  simulate->add_option("--n", sim.n, "number of users")->required();
  AddChannelFlags(*simulate, sim.channel);
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--stream", sim.stream, "stream id");
  simulate->add_option("--output", sim.output, "histogram or dataset")
      ->check(CLI::IsMember({"histogram", "dataset"}));
  simulate->add_option("--out", sim.out_path, "output file (default stdout)");
  simulate->add_option("--truth-out", sim.truth_out,
                       "also write the true counts here");

  SweepFlags swp;
  CLI::App* sweep =
      app.add_subcommand("sweep", "run a Monte-Carlo grid and write CSV");
  sweep->add_option("--config", swp.config_path, "sweep config JSON")
      ->required();
  sweep->add_option("--out", swp.out_path, "output CSV (default stdout)");
  sweep->add_option("--threads", swp.threads,
                    "worker threads (default LDPFREQ_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--timing", swp.timing, "record wall-clock timings");

  ConvergenceFlags conv;
  CLI::App* convergence = app.add_subcommand(
      "ibu-convergence", "squared distance of IBU iterates to the MLE");
  CLI::Option* conv_input =
      convergence->add_option("--input", conv.input, "report histogram file");
  convergence->add_option("--format", conv.format, "histogram format")
      ->check(CLI::IsMember(formats));
  CLI::Option* conv_zipf = convergence->add_option(
      "--zipf", conv.zipf_s, "simulate reports from Zipf(s) instead");
  CLI::Option* conv_k = convergence->add_option("--k", conv.k, "domain size");
  convergence->add_option("--n", conv.n, "number of users");
  convergence->add_option("--seed", conv.seed, "master seed");
  conv_zipf->excludes(conv_input)->needs(conv_k);
  conv_input->excludes(conv_zipf);
  AddChannelFlags(*convergence, conv.channel);
  convergence->add_option("--max-iters", conv.max_iters, "iterations")
      ->check(CLI::PositiveNumber);
  convergence->add_option("--stride", conv.stride, "checkpoint stride")
      ->check(CLI::PositiveNumber);
  convergence->add_option("--label", conv.label, "series label");
  convergence->add_option("--out", conv.out_path, "output CSV");

  OracleAgreementOptions ver;
  CLI::App* verify = app.add_subcommand(
      "verify", "compare the closed-form MLE with a brute-force oracle");
  verify->add_option("--trials", ver.trials, "random instances")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", ver.seed, "seed");
  verify->add_option("--max-k", ver.max_k, "largest domain size")
      ->check(CLI::Range(2, 6));
  verify->add_option("--tolerance", ver.linf_tolerance, "L-infinity tolerance");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (const auto& [cmd, channel] :
       {std::pair{estimate, &est.channel}, std::pair{simulate, &sim.channel},
        std::pair{convergence, &conv.channel}}) {
    if (*cmd && !channel->epsilon.has_value() && !channel->p.has_value()) {
      err << "one of --epsilon or --p is required\n"
          << "Run with --help for more information.\n";
      return kExitUsage;
    }
  }
  if (*simulate && !sim.zipf_s.has_value() && sim.theta_path.empty()) {
    err << "one of --zipf or --theta is required\n";
    return kExitUsage;
  }
  if (*convergence && !conv.zipf_s.has_value() && conv.input.empty()) {
    err << "one of --input or --zipf is required\n";
    return kExitUsage;
  }

  if (*estimate) return RunEstimate(est, out, err);
  if (*simulate) return RunSimulate(sim, out, err);
  if (*sweep) return RunSweepCommand(swp, out, err);
  if (*convergence) return RunConvergenceCommand(conv, out, err);
  if (*verify) return RunVerify(ver, out, err);
  return kExitUsage;
}

}  // namespace ldpfreq
