// SPDX-License-Identifier: Apache-2.0
//
// holosense: channel sensing for holographic interference surfaces
// Copyright (C) 2026 The holosense authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// holosense <experiment> --config <path> [--seed <u64>] [--jobs <n>] [--out <dir>]

#include "holosense/error.hpp"
#include "holosense/experiment.hpp"
#include "holosense/manifest.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <string>

namespace
{
void configure_logging()
{
    const char *env = std::getenv("HOLOSENSE_LOG");
    const std::string level = env ? env : "info";
    if (level == "error")
        spdlog::set_level(spdlog::level::err);
    else if (level == "warn")
        spdlog::set_level(spdlog::level::warn);
    else if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else
        spdlog::set_level(spdlog::level::info);
    if (level != "error" && level != "warn" && level != "info" && level != "debug")
        spdlog::warn("HOLOSENSE_LOG='{}' not recognised; using info", level);
    spdlog::set_pattern("[%l] %v");
}
} // namespace

int main(int argc, char **argv)
{
    configure_logging();

    CLI::App app{"Holographic surface channel sensing experiments"};
    app.set_version_flag("--version", std::string(holosense::version()));
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out_dir = ".";

    for (std::string_view name : holosense::cli::kind_names())
    {
        CLI::App *sub = app.add_subcommand(std::string(name), "run the " + std::string(name) + " experiment");
        sub->add_option("--config", config_path, "experiment description (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "root seed, overrides noise.seed");
        sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory");
    }

    CLI11_PARSE(app, argc, argv);

    try
    {
        CLI::App *sub = app.get_subcommands().front();
        holosense::cli::RunOptions options;
        options.kind = holosense::cli::parse_kind(sub->get_name());
        if (sub->count("--seed"))
            options.seed = seed;
        options.jobs = jobs;
        options.out_dir = out_dir;

        const holosense::cli::ExperimentConfig config = holosense::cli::load_config(config_path);
        const holosense::cli::RunReport report = holosense::cli::run(config, options);
        std::cout << report.manifest.string() << '\n';
        return 0;
    }
    catch (const holosense::ConfigError &e)
    {
        std::cerr << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
