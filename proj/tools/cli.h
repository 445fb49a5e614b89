// Copyright 2026 The qdouble Authors
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

#ifndef QDOUBLE_TOOLS_CLI_H
#define QDOUBLE_TOOLS_CLI_H

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdouble/experiments.h"
#include "qdouble/io.h"

namespace qdouble::cli {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2 };

struct CatalogEntry {
    std::string name;
    std::string description;
    std::vector<std::string> fields;
};

const std::vector<CatalogEntry> &list_experiments();
void print_catalog(std::ostream &out, bool as_json);

/// A fully parsed and validated experiment configuration.
struct ExperimentConfig {
    std::string experiment;
    /// Null for experiments that need no lattice (un-check).
    ModelPtr model;
    ExperimentOptions options;
    std::optional<std::string> output;

    AbelianGeometry abelian;
    NonabelianGeometry nonabelian;
    Element g = kIdentity;
    Element h = kIdentity;
    std::optional<double> expected_bf_rho1;
    std::vector<RestrictedStep> steps;
    ElongationGeometry elongation;
    std::size_t max_n = 6;
    std::vector<std::size_t> degrees;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json &j, const std::filesystem::path &base_dir = {});

/// Runs the configured experiment. Geometry rejected by the core surfaces as
/// ConfigError.
ExperimentReport run_experiment(const ExperimentConfig &config);

struct RunOptions {
    std::optional<std::string> out;
    std::size_t threads = 1;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
    bool wall_time = true;
    std::optional<std::string> dump_state;
};

/// Loads `config_path`, runs it, writes the report and prints a summary.
/// Returns kExitPass, kExitFail or kExitConfig.
int run(const std::filesystem::path &config_path, const RunOptions &options, std::ostream &out, std::ostream &err);

void print_summary(const ExperimentReport &report, bool verbose, std::ostream &out);

}  // namespace qdouble::cli

#endif
