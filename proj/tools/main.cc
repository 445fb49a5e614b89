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

#include <iostream>

#include "CLI11.hpp"
#include "cli.h"

int main(int argc, char **argv) {
    CLI::App app{"Simulate quantum double ground states and anyon braiding in the doubled Hilbert space"};
    app.require_subcommand(1);

    qdouble::cli::RunOptions options;
    std::string config_path;
    std::uint64_t seed = 0;
    auto *run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", options.out, "Report path (default: config output field or <config>.report.json)");
    run->add_option("--threads", options.threads, "State engine threads")->check(CLI::Range(1, 256));
    auto *seed_opt = run->add_option("--seed", seed, "Seed for sampled property checks (overrides the config)");
    run->add_flag("--verbose", options.verbose, "Print every quantity");
    bool no_wall_time = false;
    run->add_flag("--no-wall-time", no_wall_time, "Omit wall_ms so reports are byte-identical across runs");
    run->add_option("--dump-state", options.dump_state, "Also write the prepared ground state as JSON lines");

    bool as_json = false;
    auto *list = app.add_subcommand("list", "List available experiments");
    list->add_flag("--json", as_json, "Machine-readable catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : qdouble::cli::kExitConfig;
    }

    if (list->parsed()) {
        qdouble::cli::print_catalog(std::cout, as_json);
        return 0;
    }
    if (seed_opt->count() > 0) {
        options.seed = seed;
    }
    options.wall_time = !no_wall_time;
    return qdouble::cli::run(config_path, options, std::cout, std::cerr);
}
