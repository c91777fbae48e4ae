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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Tolerances are fixed; nothing here adapts
// to the results.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "ldpfreq/cli.h"
#include "ldpfreq/core.h"
#include "ldpfreq/estimators.h"
#include "ldpfreq/harness.h"
#include "ldpfreq/mechanism.h"
#include "ldpfreq/metrics.h"
#include "ldpfreq/sweep.h"
#include "test_util.h"

namespace ldpfreq {
namespace {

using Clock = std::chrono::steady_clock;
using testing_util::BoundaryValue;
using testing_util::LInf;
using testing_util::RandomPhi;
using testing_util::RandomSimplexPoint;
using testing_util::SortedCopy;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int Threads() {
  return ThreadsFromEnv(
      std::max(1, static_cast<int>(std::thread::hardware_concurrency())));
}

// ------------------------------------------------------------------------

Outcome OracleEquivalence() {
  const auto start = Clock::now();
  OracleAgreementOptions options;
  options.trials = 1000;
  options.seed = 20261016;
  options.min_k = 2;
  options.max_k = 6;
  options.min_epsilon = 0.5;
  options.max_epsilon = 6.0;
  options.linf_tolerance = 1e-4;
  options.nll_slack = 1e-9;
  absl::StatusOr<OracleAgreementReport> report = RunOracleAgreement(options);
  const double secs = Seconds(start);
  Outcome o;
  if (!report.ok()) {
    o.detail = std::string(report.status().message());
    return o;
  }
  o.pass = report->ok() && report->trials == 1000 && secs < 300.0;
  o.detail = absl::StrFormat(
      "%d trials, %d failures, max linf %.3g, max nll excess %.3g, %.1fs",
      report->trials, report->failures, report->max_linf,
      report->max_nll_excess, secs);
  for (const std::string& d : report->failure_details) o.notes.push_back(d);
  return o;
}

Outcome HandTrace() {
  Outcome o;
  const RRParams params = *ParamsFromP(3, 2.0 / 3.0);
  const Distribution phi = *Distribution::Create({0.1, 0.3, 0.6});
  absl::StatusOr<MleResult> r = EstimateMle(phi, params);
  if (!r.ok()) {
    o.detail = std::string(r.status().message());
    return o;
  }
  const std::vector<double> want = {0.0, 2.0 / 9.0, 7.0 / 9.0};
  const double err = LInf(r->theta.probs(), want);
  const double lambda_err = std::abs(r->trace.lambda - 0.54);
  o.pass = std::abs(params.q - 1.0 / 6.0) <= 1e-15 && err <= 1e-12 &&
           r->trace.n_zeros == 1 && lambda_err <= 1e-12;
  o.detail = absl::StrFormat("theta err %.2g, n=%d, lambda err %.2g", err,
                             r->trace.n_zeros, lambda_err);
  return o;
}

Outcome IbuConvergence() {
  Outcome o;
  const auto start = Clock::now();
  const int k = 500;
  const RRParams params = *ParamsFromEpsilon(k, 1.0);
  const Distribution theta = *ZipfDistribution({k, 1.3});
  bool all = true;
  std::vector<std::string> parts;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const SampledData data = *SampleDataset(theta, 10000, params, {seed, 0});
    const Distribution phi = *EmpiricalHistogram(data.randomized);
    absl::StatusOr<std::vector<ConvergencePoint>> series =
        RunIbuConvergence(phi, params, 40000, 100);
    if (!series.ok()) {
      o.detail = std::string(series.status().message());
      return o;
    }
    double at_100 = -1, at_10000 = -1;
    int64_t below = -1, tenfold = -1;
    for (const ConvergencePoint& pt : *series) {
      if (pt.t == 100) at_100 = pt.squared_error;
      if (pt.t == 10000) at_10000 = pt.squared_error;
    }
    for (const ConvergencePoint& pt : *series) {
      if (below < 0 && pt.squared_error < 1e-8) below = pt.t;
      if (tenfold < 0 && pt.t > 100 && pt.squared_error * 10 <= at_100) {
        tenfold = pt.t;
      }
    }
    const double ratio = at_100 / at_10000;
    const bool ok = below >= 0 && below <= 40000 && ratio >= 100.0;
    all = all && ok;
    const int violations = CountMonotonicityViolations(*series, 10, 1e-12);
    o.notes.push_back(absl::StrFormat(
        "seed %d: below 1e-8 at t=%d, err(1e2)/err(1e4)=%.3g, 10x drop from "
        "t=100 by t=%d, final %.3g, monotonicity violations after t=10: %d",
        seed, below, ratio, tenfold, series->back().squared_error,
        violations));
    parts.push_back(absl::StrFormat("%.3g", ratio));
  }
  const double secs = Seconds(start);
  o.pass = all && secs < 120.0;
  o.detail = absl::StrFormat("5 samples, ratios [%s], %.1fs",
                             absl::StrJoin(parts, " "), secs);
  return o;
}

// ------------------------------------------------------------------------

using CellKey = std::tuple<int, double, int64_t, std::string>;

struct SweepData {
  std::vector<SweepRecord> records;
  SweepSummary summary;
  double secs = 0.0;
};

absl::StatusOr<SweepData> CollectSweep(const SweepConfig& config) {
  SweepData data;
  const auto start = Clock::now();
  absl::StatusOr<SweepSummary> summary = RunSweep(
      config, [&](const SweepRecord& r) { data.records.push_back(r); },
      {.threads = Threads()});
  if (!summary.ok()) return summary.status();
  data.summary = *summary;
  data.secs = Seconds(start);
  return data;
}

SweepConfig GridConfig() {
  SweepConfig config;
  config.k_values = {50, 100};
  config.epsilon_values = {1.0, 2.0, 4.0};
  config.n_values = {1000, 10000};
  config.dist_specs = {ZipfDistSpec(0.01), ZipfDistSpec(1.3),
                       ZipfDistSpec(2.5)};
  config.estimators = {EstimatorKind::kInvN, EstimatorKind::kInvP,
                       EstimatorKind::kMle};
  config.n_seeds = 50;
  config.master_seed = 6102;
  return config;
}

Outcome NllDominance(const SweepData& data) {
  Outcome o;
  std::map<std::tuple<CellKey, int>, std::map<std::string, double>> by_task;
  for (const SweepRecord& r : data.records) {
    by_task[{{r.k, r.epsilon, r.n, r.dist_id}, r.seed_index}][r.estimator] =
        r.nll_per_sample;
  }
  int checked = 0, violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [key, nll] : by_task) {
    if (nll.size() != 3) {
      ++violations;
      continue;
    }
    const double excess =
        nll.at("mle") - std::min(nll.at("invn"), nll.at("invp"));
    worst = std::max(worst, excess);
    if (excess > 1e-9) ++violations;
    ++checked;
  }
  o.pass = data.summary.failures == 0 && checked == 36 * 50 && violations == 0 &&
           data.secs < 600.0;
  o.detail = absl::StrFormat(
      "%d (cell, seed) pairs, %d violations, max NLL(mle)-min(baselines) "
      "%.3g, %.1fs",
      checked, violations, worst, data.secs);
  return o;
}

std::map<CellKey, std::map<std::string, double>> SeedMeanMse(
    const std::vector<SweepRecord>& records) {
  std::map<CellKey, std::map<std::string, std::pair<double, int>>> acc;
  for (const SweepRecord& r : records) {
    auto& slot = acc[{r.k, r.epsilon, r.n, r.dist_id}][r.estimator];
    slot.first += r.mse;
    slot.second += 1;
  }
  std::map<CellKey, std::map<std::string, double>> out;
  for (const auto& [cell, m] : acc) {
    for (const auto& [name, sum] : m) out[cell][name] = sum.first / sum.second;
  }
  return out;
}

Outcome SandwichAndFlip(const SweepData& grid) {
  Outcome o;
  const auto means = SeedMeanMse(grid.records);
  int violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [cell, m] : means) {
    const double excess =
        m.at("mle") - std::max(m.at("invn"), m.at("invp"));
    worst = std::max(worst, excess);
    if (excess > 1e-12) {
      ++violations;
      o.notes.push_back(absl::StrFormat(
          "sandwich violated at k=%d eps=%g n=%d %s: mle %.6g invn %.6g "
          "invp %.6g",
          std::get<0>(cell), std::get<1>(cell), std::get<2>(cell),
          std::get<3>(cell), m.at("mle"), m.at("invn"), m.at("invp")));
    }
  }

  SweepConfig flip;
  flip.k_values = {100};
  flip.epsilon_values = {2.0};
  flip.n_values = {100000};
  flip.dist_specs = {ZipfDistSpec(0.01), ZipfDistSpec(2.5)};
  flip.estimators = {EstimatorKind::kInvN, EstimatorKind::kInvP,
                     EstimatorKind::kMle};
  flip.n_seeds = 50;
  flip.master_seed = 6103;
  absl::StatusOr<SweepData> data = CollectSweep(flip);
  if (!data.ok()) {
    o.detail = std::string(data.status().message());
    return o;
  }
  const auto flip_means = SeedMeanMse(data->records);
  const auto& flat = flip_means.at({100, 2.0, 100000, "zipf-0.01"});
  const auto& steep = flip_means.at({100, 2.0, 100000, "zipf-2.5"});
  const bool flat_ok = flat.at("invn") < flat.at("invp");
  const bool steep_ok = steep.at("invp") < steep.at("invn");
  o.notes.push_back(absl::StrFormat(
      "s=0.01: invn %.4g invp %.4g mle %.4g; s=2.5: invn %.4g invp %.4g "
      "mle %.4g",
      flat.at("invn"), flat.at("invp"), flat.at("mle"), steep.at("invn"),
      steep.at("invp"), steep.at("mle")));
  o.pass = violations == 0 && means.size() == 36 && flat_ok && steep_ok &&
           data->summary.failures == 0;
  o.detail = absl::StrFormat(
      "%d cells, %d sandwich violations (max excess %.3g); flip %s/%s",
      means.size(), violations, worst, flat_ok ? "ok" : "missing",
      steep_ok ? "ok" : "missing");
  return o;
}

// ------------------------------------------------------------------------

Outcome InvUnbiased() {
  Outcome o;
  const int k = 10;
  const int64_t n = 10000;
  const int sims = 2000;
  const RRParams params = *ParamsFromEpsilon(k, 2.0);
  const Distribution theta = *ZipfDistribution({k, 1.3});
  std::vector<double> sum(k, 0.0), sum_sq(k, 0.0);
  std::vector<std::vector<double>> draws;
  draws.reserve(sims);
  for (int s = 0; s < sims; ++s) {
    const SampledData data =
        *SampleDataset(theta, n, params, {77, static_cast<uint64_t>(s)});
    draws.push_back(*EstimateInv(*EmpiricalHistogram(data.randomized), params));
  }
  std::vector<double> mean(k, 0.0), var(k, 0.0);
  for (const auto& d : draws) {
    for (int i = 0; i < k; ++i) mean[i] += d[i] / sims;
  }
  for (const auto& d : draws) {
    for (int i = 0; i < k; ++i) {
      var[i] += (d[i] - mean[i]) * (d[i] - mean[i]) / (sims - 1);
    }
  }
  bool unbiased = true;
  double worst_z = 0.0;
  double dev_printed = 0.0, dev_multinomial = 0.0;
  for (int i = 0; i < k; ++i) {
    const double se = std::sqrt(var[i] / sims);
    const double z = std::abs(mean[i] - theta[i]) / se;
    worst_z = std::max(worst_z, z);
    if (std::abs(mean[i] - theta[i]) > 4.0 * se) unbiased = false;
    dev_printed = std::max(
        dev_printed,
        std::abs(var[i] / InvVarianceTheoretical(theta[i], n, params) - 1.0));
    dev_multinomial = std::max(
        dev_multinomial,
        std::abs(var[i] / InvVarianceMultinomial(theta[i], n, params) - 1.0));
  }
  // Relative standard error of a sample variance is about sqrt(2/(sims-1)).
  const double var_tol = 4.0 * std::sqrt(2.0 / (sims - 1));
  const auto verdict = [&](double dev) {
    return dev <= var_tol ? "matches" : "does not match";
  };
  o.pass = unbiased;
  o.detail = absl::StrFormat("max |mean-theta|/se %.2f (limit 4)", worst_z);
  o.notes.push_back(absl::StrFormat(
      "variance: printed formula %s (max rel dev %.3g), multinomial "
      "m(1-m)/(N(p-q)^2) %s (max rel dev %.3g); tolerance %.3g",
      verdict(dev_printed), dev_printed, verdict(dev_multinomial),
      dev_multinomial, var_tol));
  return o;
}

// ------------------------------------------------------------------------
// Property suites.

struct Suite {
  std::string name;
  int trials = 0;
  int failures = 0;
  std::string extra;
};

// phi_i <= phi_j implies theta_i <= theta_j; a strict gap with theta_j > 0
// stays strict.
Suite Monotonicity() {
  Suite s{"monotonicity"};
  Rng rng(Seed{101});
  for (; s.trials < 1000; ++s.trials) {
    const int k = 2 + static_cast<int>(rng.UniformInt(60));
    const RRParams params = *ParamsFromEpsilon(k, 0.2 + 6 * rng.UniformDouble());
    const Distribution phi = RandomPhi(k, rng);
    const Distribution theta = EstimateMle(phi, params)->theta;
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      for (int j = 0; j < k && ok; ++j) {
        if (phi[i] <= phi[j] && theta[i] > theta[j]) ok = false;
        if (phi[i] < phi[j] && theta[j] > 0.0 && !(theta[i] < theta[j])) {
          ok = false;
        }
      }
    }
    if (!ok) ++s.failures;
  }
  return s;
}

Suite Permutation() {
  Suite s{"permutation equivariance (inv, invn, invp, mle, ibu)"};
  Rng rng(Seed{102});
  double worst = 0.0;
  for (; s.trials < 600; ++s.trials) {
    const int k = 2 + static_cast<int>(rng.UniformInt(40));
    const RRParams params = *ParamsFromEpsilon(k, 0.2 + 5 * rng.UniformDouble());
    const Distribution phi = RandomPhi(k, rng);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pv(k);
    for (int i = 0; i < k; ++i) pv[i] = phi[perm[i]];
    const Distribution phi_perm = *Distribution::Create(pv);
    const auto all = [&](const Distribution& x) {
      const IbuOptions ibu{.n_iters = 300, .early_stop_tol = std::nullopt};
      return std::vector<std::vector<double>>{
          *EstimateInv(x, params), EstimateInvN(x, params)->vector(),
          EstimateInvP(x, params)->vector(),
          EstimateMle(x, params)->theta.vector(),
          EstimateIbuRr(x, params, ibu)->theta.vector()};
    };
    const auto a = all(phi);
    const auto b = all(phi_perm);
    bool ok = true;
    for (size_t e = 0; e < a.size(); ++e) {
      for (int i = 0; i < k; ++i) {
        const double d = std::abs(b[e][i] - a[e][perm[i]]);
        worst = std::max(worst, d);
        if (d > 1e-12) ok = false;
      }
    }
    if (!ok) ++s.failures;
  }
  s.extra = absl::StrFormat("max deviation %.2g", worst);
  return s;
}

// g evaluated in long double from the sorted values.
long double G(const std::vector<double>& e, int n, double q) {
  long double tail = 0.0L;
  for (size_t i = n; i < e.size(); ++i) tail += e[i];
  return (1.0L - n * static_cast<long double>(q)) * e[n] - q * tail;
}

Suite MinimalN() {
  Suite s{"minimal n / g(n) sign pattern"};
  Rng rng(Seed{103});
  int ambiguous = 0;
  for (; s.trials < 1000; ++s.trials) {
    const int k = 2 + static_cast<int>(rng.UniformInt(60));
    const RRParams params = *ParamsFromEpsilon(k, 0.2 + 6 * rng.UniformDouble());
    const Distribution phi = RandomPhi(k, rng);
    const MleResult r = *EstimateMle(phi, params);
    const std::vector<double> e = SortedCopy(phi.probs());
    const int n = r.trace.n_zeros;
    bool ok = n >= 0 && n < k;
    // Negative strictly before n, nonnegative from n on.
    for (int m = 0; m < k && ok; ++m) {
      const long double g = G(e, m, params.q);
      if (std::abs(static_cast<double>(g)) <= 1e-15) {
        ++ambiguous;
        continue;
      }
      if (m < n && g >= 0) ok = false;
      if (m >= n && g < 0) ok = false;
    }
    if (!ok) ++s.failures;
  }
  s.extra = absl::StrFormat("%d near-zero g values skipped", ambiguous);
  return s;
}

Suite LagrangeForm() {
  Suite s{"Lagrange zero-set form"};
  Rng rng(Seed{104});
  for (; s.trials < 1000; ++s.trials) {
    const int k = 2 + static_cast<int>(rng.UniformInt(60));
    const RRParams params = *ParamsFromEpsilon(k, 0.2 + 6 * rng.UniformDouble());
    const Distribution phi = RandomPhi(k, rng);
    const Distribution theta = EstimateMle(phi, params)->theta;
    const double d = params.p - params.q;
    int zeros = 0;
    double kept = 0.0;
    double max_zero_phi = -1.0, min_kept_phi = 2.0;
    for (int i = 0; i < k; ++i) {
      if (theta[i] == 0.0) {
        ++zeros;
        max_zero_phi = std::max(max_zero_phi, phi[i]);
      } else {
        kept += phi[i];
        min_kept_phi = std::min(min_kept_phi, phi[i]);
      }
    }
    const double lambda = d * kept / (1.0 - zeros * params.q);
    bool ok = zeros < k && max_zero_phi <= min_kept_phi;
    for (int i = 0; i < k && ok; ++i) {
      if (theta[i] > 0.0 &&
          std::abs(theta[i] - (phi[i] / lambda - params.q / d)) > 1e-12) {
        ok = false;
      }
    }
    if (!ok) ++s.failures;
  }
  return s;
}

Suite Collinearity() {
  Suite s{"collinearity t=(1-v)/(p-v)"};
  Rng rng(Seed{105});
  double worst = 0.0;
  for (; s.trials < 1000; ++s.trials) {
    const int k = 3 + static_cast<int>(rng.UniformInt(50));
    const RRParams params = *ParamsFromEpsilon(k, 0.2 + 5 * rng.UniformDouble());
    const double q = params.q;
    const double v = q * rng.UniformDouble();
    const double floor = (k * q - v) / (k - 1);
    const double spare = 1.0 - v - (k - 1) * floor;
    const Distribution rest = RandomSimplexPoint(k - 1, rng);
    std::vector<double> pv(k);
    const int smallest = static_cast<int>(rng.UniformInt(k));
    for (int i = 0, r = 0; i < k; ++i) {
      pv[i] = i == smallest ? v : floor + spare * rest[r++];
    }
    const Distribution phi = *Distribution::Create(pv);
    const Distribution mle = EstimateMle(phi, params)->theta;
    const Distribution invn = *EstimateInvN(phi, params);
    const Distribution invp = *EstimateInvP(phi, params);
    const double t = (1.0 - v) / (params.p - v);
    double dev = 0.0;
    for (int i = 0; i < k; ++i) {
      dev = std::max(dev,
                     std::abs((invn[i] - invp[i]) - t * (mle[i] - invp[i])));
    }
    worst = std::max(worst, dev);
    // t >= 1 puts the MLE between InvP and InvN.
    if (dev > 1e-9 || t < 1.0) ++s.failures;
  }
  s.extra = absl::StrFormat("max deviation %.2g", worst);
  return s;
}

Suite InvNegativity() {
  Suite s{"Inv negativity at a zero entry"};
  const int k = 10;
  const RRParams params = *ParamsFromEpsilon(k, 2.0);
  std::vector<double> w = ZipfDistribution({k - 1, 1.3})->vector();
  w.push_back(0.0);
  const Distribution theta = *Distribution::Create(w);
  int negative = 0;
  for (; s.trials < 1000; ++s.trials) {
    const SampledData data = *SampleDataset(
        theta, 10000, params, {55, static_cast<uint64_t>(s.trials)});
    const std::vector<double> inv =
        *EstimateInv(*EmpiricalHistogram(data.randomized), params);
    if (inv[k - 1] < 0.0) ++negative;
  }
  const double freq = static_cast<double>(negative) / s.trials;
  if (freq < 0.4) s.failures = 1;
  s.extra = absl::StrFormat("frequency %.3f (need >= 0.4)", freq);
  return s;
}

Outcome PropertySuites() {
  Outcome o;
  std::vector<Suite> suites = {Monotonicity(), Permutation(),  MinimalN(),
                               LagrangeForm(), Collinearity(), InvNegativity()};
  o.pass = true;
  int total = 0;
  for (const Suite& s : suites) {
    const bool ok = s.failures == 0 && s.trials >= 500;
    o.pass = o.pass && ok;
    total += s.trials;
    o.notes.push_back(absl::StrFormat("%s %s: %d trials, %d failures%s",
                                      ok ? "ok  " : "FAIL", s.name, s.trials,
                                      s.failures,
                                      s.extra.empty() ? "" : ", " + s.extra));
  }
  o.detail = absl::StrFormat("%d suites, %d trials", suites.size(), total);
  return o;
}

// ------------------------------------------------------------------------

// Minimum wall time of EstimateMle per domain size. Rounds visit every size
// in turn so that a transient slowdown cannot land on a single size.
std::vector<double> TimeMle(const std::vector<int>& sizes, int rounds,
                            std::string* error) {
  std::vector<Distribution> inputs;
  std::vector<RRParams> params;
  for (size_t i = 0; i < sizes.size(); ++i) {
    Rng rng(Seed{200 + i});
    inputs.push_back(RandomSimplexPoint(sizes[i], rng));
    params.push_back(*ParamsFromEpsilon(sizes[i], 3.0));
  }
  std::vector<double> best(sizes.size(),
                           std::numeric_limits<double>::infinity());
  for (int r = 0; r < rounds; ++r) {
    for (size_t i = 0; i < sizes.size(); ++i) {
      const auto start = Clock::now();
      absl::StatusOr<MleResult> result = EstimateMle(inputs[i], params[i]);
      const double secs = Seconds(start);
      if (!result.ok()) {
        *error = absl::StrCat("K=", sizes[i], ": ", result.status().message());
        continue;
      }
      best[i] = std::min(best[i], secs);
    }
  }
  return best;
}

Outcome Performance() {
  Outcome o;
  std::string error;
  const double million = TimeMle({1000000}, 5, &error)[0];
  const std::vector<int> sizes = {1 << 16, 1 << 17, 1 << 18, 1 << 19, 1 << 20};
  const std::vector<double> times = TimeMle(sizes, 15, &error);
  std::vector<std::string> parts;
  double worst_ratio = 0.0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    parts.push_back(absl::StrFormat("2^%d %.2fms", 16 + i, 1e3 * times[i]));
    if (i > 0) worst_ratio = std::max(worst_ratio, times[i] / times[i - 1]);
  }
  o.pass = error.empty() && million < 1.0 && worst_ratio <= 2.5;
  o.detail = absl::StrFormat("K=1e6 %.3fs, worst doubling ratio %.2f",
                             million, worst_ratio);
  o.notes.push_back(absl::StrJoin(parts, ", "));
  if (!error.empty()) o.notes.push_back(error);
  return o;
}

Outcome Determinism() {
  Outcome o;
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "ldpfreq_acceptance";
  std::filesystem::create_directories(dir);
  const std::string config = (dir / "sweep.json").string();
  std::ofstream(config) << R"({
    "k_values": [20, 50], "epsilon_values": [1, 4], "n_values": [2000],
    "dist_specs": [{"type": "zipf", "s": 0.01}, {"type": "zipf", "s": 1.3}],
    "estimators": ["inv", "invn", "invp", "mle", "ibu"],
    "n_seeds": 4, "ibu_iters": 500, "master_seed": 99})";
  const auto run = [&](const std::string& threads, const std::string& name) {
    std::ostringstream out, err;
    const std::string path = (dir / name).string();
    const int code = CliMain(
        {"sweep", "--config", config, "--threads", threads, "--out", path},
        out, err);
    std::ifstream in(path, std::ios::binary);
    std::stringstream bytes;
    bytes << in.rdbuf();
    return std::make_pair(code, bytes.str());
  };
  const auto [c1, a] = run("1", "a.csv");
  const auto [c2, b] = run("4", "b.csv");
  const auto [c3, c] = run("1", "c.csv");
  std::filesystem::remove_all(dir);
  const size_t rows = std::count(a.begin(), a.end(), '\n');
  o.pass = c1 == 0 && c2 == 0 && c3 == 0 && rows == 1 + 8 * 4 * 5 &&
           a == b && a == c;
  o.detail = absl::StrFormat("%d lines, threads 1 vs 4 %s, rerun %s", rows,
                             a == b ? "identical" : "DIFFER",
                             a == c ? "identical" : "DIFFER");
  return o;
}

}  // namespace
}  // namespace ldpfreq

int main() {
  using ldpfreq::Outcome;
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  std::optional<absl::StatusOr<ldpfreq::SweepData>> grid;
  const auto grid_data = [&]() -> const absl::StatusOr<ldpfreq::SweepData>& {
    if (!grid.has_value()) grid = ldpfreq::CollectSweep(ldpfreq::GridConfig());
    return *grid;
  };
  const auto with_grid = [&](Outcome (*f)(const ldpfreq::SweepData&)) {
    return [&, f]() {
      const auto& data = grid_data();
      if (!data.ok()) return Outcome{false, std::string(data.status().message())};
      return f(*data);
    };
  };
  const std::vector<Entry> entries = {
      {"oracle_equivalence", ldpfreq::OracleEquivalence},
      {"hand_trace_fixture", ldpfreq::HandTrace},
      {"ibu_converges_to_mle", ldpfreq::IbuConvergence},
      {"nll_dominance", with_grid(ldpfreq::NllDominance)},
      {"mse_sandwich_and_regime_flip", with_grid(ldpfreq::SandwichAndFlip)},
      {"inv_unbiasedness", ldpfreq::InvUnbiased},
      {"theorem_property_suites", ldpfreq::PropertySuites},
      {"performance", ldpfreq::Performance},
      {"determinism", ldpfreq::Determinism},
  };
  int failed = 0;
  for (const Entry& e : entries) {
    const Outcome o = e.run();
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", e.name,
                o.detail.c_str());
    for (const std::string& n : o.notes) std::printf("      %s\n", n.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(entries.size()) - failed, entries.size());
  return failed == 0 ? 0 : 1;
}
