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

#ifndef HOLOSENSE_EXPERIMENT_HPP
#define HOLOSENSE_EXPERIMENT_HPP

#include "holosense/channel.hpp"
#include "holosense/patterns.hpp"
#include "holosense/pmcs.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace holosense::cli
{

enum class ExperimentKind
{
    pattern_raw,
    pattern_psis,
    psis_demo,
    nmse_snr,
    nmse_size,
    nmse_order,
    bounds,
};

// "pattern-raw", "pattern-psis", ... Throws ConfigError on unknown names.
ExperimentKind parse_kind(std::string_view name);
std::string_view to_string(ExperimentKind kind);
std::vector<std::string_view> kind_names();

struct BoundsConfig
{
    int instances = 1000;
    double epsilon = 1e-3;
    int lemma1_K = 16;
    int lemma1_N = 2;
    int lemma1_est_order = 4;
    std::vector<int> lemma2_K{16, 64, 256};
    int lemma3_K = 64;
    int lemma3_N = 2;
    int lemma3_est_order = 10;
};

// Parsed and validated experiment description. See docs/config.md.
struct ExperimentConfig
{
    std::optional<ExperimentKind> kind;
    UpaGeometry geometry = UpaGeometry::make(16, 16);
    double spacing_v_wl = 0.5;
    double spacing_h_wl = 0.5;
    std::vector<LosUser> users;

    std::vector<std::optional<double>> snr_db{std::nullopt}; // nullopt: noiseless
    bool snr_given = false; // nmse-snr sweeps -10..30 dB in 5 dB steps otherwise
    int trials = 100;
    std::uint64_t seed = 1;

    pmcs::Config pmcs;
    std::vector<std::pair<int, int>> sizes;  // nmse-size
    std::vector<int> est_orders;             // nmse-order; empty: full range
    AngularGrid pattern_grid;
    BoundsConfig bounds;

    std::string output_prefix = "holosense";
    std::string source; // the parsed document, re-serialised for the manifest
};

// Parses and validates a JSON document. Every problem found is collected into
// one ConfigError; syntax errors report their byte offset.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path &path);

struct RunOptions
{
    std::optional<ExperimentKind> kind; // overrides / must agree with the file
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::filesystem::path out_dir = ".";
};

struct RunReport
{
    ExperimentKind kind;
    std::vector<std::filesystem::path> files; // data files, manifest excluded
    std::filesystem::path manifest;
    int failures = 0;
    double wall_time_s = 0.0;
};

// Executes the experiment and writes <prefix>_results.csv,
// <prefix>_summary.csv, optional pattern / hologram CSVs and
// <prefix>_manifest.json under out_dir.
RunReport run(const ExperimentConfig &config, const RunOptions &options);

// JSON object with angles in degrees, complex numbers as [re, im] and the
// NMSE when the result was scored.
std::string pmcs_result_json(const pmcs::Result &result);

} // namespace holosense::cli

#endif
