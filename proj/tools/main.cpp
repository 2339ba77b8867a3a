// Copyright 2026 The qmetric Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qmetric: reproduction presets, custom estimation specs and exact oracles.
//
//   qmetric run table1 --seed 42 --out results
//   qmetric custom data/specs/vtde_2q.json
//   qmetric oracle trace_distance data/fixtures/plus.json data/fixtures/plus_deph07.json

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmetric/error.hpp"
#include "qmetric/harness.hpp"

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kOutput = 3 };

int report(const qmetric::PresetRun& run, const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files) {
        std::cout << "wrote " << f.string() << '\n';
    }
    for (const auto& s : run.summaries()) {
        std::cout << s.label << ": n=" << s.count << " mean=" << qmetric::format_number(s.mean);
        if (s.mean_oracle) {
            std::cout << " oracle=" << qmetric::format_number(*s.mean_oracle)
                      << " mean_abs_error=" << qmetric::format_number(*s.mean_abs_error);
        }
        std::cout << '\n';
    }
    for (const auto& v : run.violations) {
        std::cerr << "violation: " << v << '\n';
    }
    return run.violations.empty() ? kOk : kViolation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variational trace distance and fidelity estimation"};
    app.require_subcommand(1);

    qmetric::RunOptions ropts;
    std::string preset;
    std::size_t trials = 0;
    std::uint64_t shots = 0;
    std::string out_dir = "results";
    std::string format = "csv";
    auto* run = app.add_subcommand("run", "Run a named reproduction preset");
    run->add_option("preset", preset, "table1 | table2 | table3 | fig2 | fig3 | fig4 | figS2")->required();
    run->add_option("--seed", ropts.seed, "Base seed")->capture_default_str();
    run->add_option("--trials", trials, "Trials per label (preset default if omitted)");
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    run->add_option("--shots", shots, "Estimate with finite shots instead of exact expectations");

    std::string spec_path;
    auto* custom = app.add_subcommand("custom", "Run an estimator described by a JSON spec");
    custom->add_option("spec", spec_path, "Spec file")->required();

    std::string metric;
    std::string file_a;
    std::string file_b;
    auto* oracle = app.add_subcommand("oracle", "Print an exact reference value");
    oracle->add_option("metric", metric, "trace_distance | fidelity | trace_norm")->required();
    oracle->add_option("A", file_a, "State (or operator) file")->required();
    oracle->add_option("B", file_b, "Second state file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run) {
            if (trials > 0) {
                ropts.trials = trials;
            }
            if (shots > 0) {
                ropts.shots = shots;
            }
            const auto fmt = format == "json" ? qmetric::OutputFormat::json : qmetric::OutputFormat::csv;
            const auto result = qmetric::run_preset(preset, ropts);
            return report(result, qmetric::write_outputs(result, out_dir, fmt));
        }
        if (*custom) {
            const auto spec = qmetric::load_custom_spec(spec_path);
            const auto result = qmetric::run_custom(spec, ropts);
            return report(result, qmetric::write_outputs(result, spec.output, spec.format));
        }
        const auto b = file_b.empty() ? std::nullopt : std::optional<std::filesystem::path>(file_b);
        std::cout << qmetric::format_oracle_value(qmetric::run_oracle(metric, file_a, b)) << '\n';
        return kOk;
    } catch (const qmetric::OutputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOutput;
    } catch (const qmetric::InvariantViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kViolation;
    } catch (const qmetric::StructureError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kViolation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kViolation;
    }
}
