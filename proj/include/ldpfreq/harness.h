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


#ifndef LDPFREQ_HARNESS_H_
#define LDPFREQ_HARNESS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpfreq/core.h"

namespace ldpfreq {

// theta_i proportional to i^-s over ranks i = 1..k (index order).
struct ZipfSpec {
  int k = 0;
  double s = 0.0;
};

absl::StatusOr<Distribution> ZipfDistribution(const ZipfSpec& spec);

enum class HistogramFormat { kCountsCsv, kProbsCsv, kJson };

absl::StatusOr<HistogramFormat> ParseHistogramFormat(std::string_view name);
// ".json" maps to kJson, anything else to kCountsCsv.
HistogramFormat GuessHistogramFormat(std::string_view path);

struct Histogram {
  Distribution dist;
  // Number of reports behind the histogram.
  int64_t n = 0;
};

// Parses a histogram from text.
//   counts-csv: one nonnegative integer per line (a trailing ",..." column is
//     not allowed; blank lines and '#' comments are skipped).
//   probs-csv: one probability per line; n must be supplied.
//   json: {"counts": [...]} or {"probs": [...], "n": N}.
// An explicit n overrides the count total only for probability inputs.
absl::StatusOr<Histogram> ParseHistogram(std::string_view text,
                                         HistogramFormat format,
                                         std::optional<int64_t> n = {});

absl::StatusOr<Histogram> IngestHistogram(const std::string& path,
                                          HistogramFormat format,
                                          std::optional<int64_t> n = {});

struct ConvergencePoint {
  int64_t t = 0;
  // ||theta_ibu(t) - theta_mle||_2^2.
  double squared_error = 0.0;
};

// Runs accelerated IBU from the uniform prior and records the squared
// distance to the closed-form MLE at t = 0, stride, 2 stride, ... and at
// max_iters.
absl::StatusOr<std::vector<ConvergencePoint>> RunIbuConvergence(
    const Distribution& phi, const RRParams& params, int64_t max_iters,
    int64_t checkpoint_stride);

// Counts checkpoints after `burn_in` where the error rose by more than
// `slack` over the previous checkpoint.
int CountMonotonicityViolations(const std::vector<ConvergencePoint>& series,
                                int64_t burn_in, double slack);

struct OracleAgreementOptions {
  int trials = 1000;
  uint64_t seed = 1;
  int min_k = 2;
  int max_k = 6;
  double min_epsilon = 0.5;
  double max_epsilon = 6.0;
  double linf_tolerance = 1e-4;
  double nll_slack = 1e-9;
};

struct OracleAgreementReport {
  int trials = 0;
  int failures = 0;
  double max_linf = 0.0;
  // max over trials of NLL(closed form) - NLL(oracle); <= slack passes.
  double max_nll_excess = -1.0;
  std::vector<std::string> failure_details;

  bool ok() const { return failures == 0; }
};

// Compares the closed-form MLE against the brute-force oracle on random
// (phi, k, epsilon) instances.
absl::StatusOr<OracleAgreementReport> RunOracleAgreement(
    const OracleAgreementOptions& options);

}  // namespace ldpfreq

#endif  // LDPFREQ_HARNESS_H_
