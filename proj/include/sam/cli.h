// Copyright 2026 The SAM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SAM_CLI_H_
#define SAM_CLI_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sam/bench.h"
#include "sam/dataset.h"

namespace sam::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point shared by the `sam` binary and the tests. args excludes the
// program name. Data goes to `out`, diagnostics to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Bench configuration file: one "key = value" per line, '#' starts a comment.
// `dataset` may repeat; every other key is last-wins.
struct BenchFile {
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  std::optional<double> train_fraction;
  std::optional<std::size_t> threads;
  std::vector<std::string> metrics;
  std::vector<std::string> models;
  std::vector<std::string> datasets;
  // Detector tunables such as "iforest.trees" or "lof.k".
  std::vector<std::pair<std::string, std::string>> tunables;
};

// Throws std::invalid_argument naming the offending line.
BenchFile ParseBenchFile(std::string_view text);

// "<name>: mulcross n=.. d=.. contamination=.. shift=.. seed=..",
// "<name>: csv path=.. [label=label] [anomaly=1]", or a bare CSV path whose
// label column is "label".
Dataset LoadDatasetSource(std::string_view source);

// Applies tunables to every matching spec. Throws std::invalid_argument on an
// unknown key or malformed value.
void ApplyTunables(
    std::vector<ModelSpec>& models,
    const std::vector<std::pair<std::string, std::string>>& tunables);

}  // namespace sam::cli

#endif  // SAM_CLI_H_
