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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmetric/algorithms.hpp"
#include "qmetric/losses.hpp"

namespace qmetric {

/// Output directory or file cannot be written.
class OutputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment spec.
class SpecError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { csv, json };

struct TrialRow {
    std::size_t trial = 0;
    std::string label;
    std::string inputs_digest;
    double estimate = 0.0;
    std::optional<double> oracle;
    std::optional<double> abs_error;
    std::optional<double> rel_error;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    double wall_time = 0.0;
    std::vector<std::string> flags;
};

struct SummaryRow {
    std::string label;
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0; ///< sample variance; 0 for a single row
    std::optional<double> mean_oracle;
    std::optional<double> mean_abs_error;
    std::optional<double> mean_rel_error;
    std::optional<double> max_abs_error;
    std::size_t iterations = 0;
};

struct TraceSeries {
    std::string label;
    std::size_t trial = 0;
    std::string stage;
    std::size_t restart = 0;
    std::vector<double> losses;
};

struct PresetRun {
    std::string name;
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::vector<TrialRow> rows;              ///< ordered by trial, then emission order
    std::vector<TraceSeries> traces;         ///< same order
    std::vector<std::string> violations;     ///< invariant failures (exit 1)
    double wall_time = 0.0;

    [[nodiscard]] std::vector<SummaryRow> summaries() const;
    [[nodiscard]] std::vector<std::string> labels() const;
    [[nodiscard]] std::vector<const TrialRow*> rows_for(const std::string& label) const;
};

struct RunOptions {
    std::uint64_t seed = 42;
    std::optional<std::size_t> trials;
    Shots shots;
    std::size_t threads = 0; ///< 0: QMETRIC_THREADS or hardware concurrency
};

const std::vector<std::string>& preset_names();
bool is_known_preset(const std::string& name);

/// Throws SpecError for an unknown preset.
PresetRun run_preset(const std::string& name, const RunOptions& opts);

struct CustomSpec {
    nlohmann::json spec;
    std::filesystem::path base_dir;
    std::filesystem::path output;
    OutputFormat format = OutputFormat::csv;
};

/// Parses a spec file; syntax and field errors raise SpecError with the
/// offending line or field.
CustomSpec load_custom_spec(const std::filesystem::path& path);
PresetRun run_custom(const CustomSpec& spec, const RunOptions& opts);

/// trace_distance, fidelity or trace_norm. trace_norm takes one operator or
/// the difference of two.
double run_oracle(const std::string& metric, const std::filesystem::path& a,
                  const std::optional<std::filesystem::path>& b);

/// 10 significant digits, trailing zeros kept.
std::string format_oracle_value(double v);
/// 12 significant digits.
std::string format_number(double v);

/// FNV-1a over the row-major real/imaginary parts.
std::string digest(std::initializer_list<const ComplexMatrix*> mats);

void write_results_csv(std::ostream& out, const PresetRun& run);
void write_trace_csv(std::ostream& out, const PresetRun& run, const std::string& label);
void write_timing_csv(std::ostream& out, const PresetRun& run);
nlohmann::json results_json(const PresetRun& run);

/// Writes every output file for `run` under `dir`; returns the paths.
std::vector<std::filesystem::path> write_outputs(const PresetRun& run, const std::filesystem::path& dir,
                                                 OutputFormat format);

std::string trace_file_name(const std::string& preset, const std::string& label);

/// One layer more than the smallest hardware-efficient depth whose parameter
/// count reaches dim SU(2^n); never below 6.
int universal_depth(int n_qubits);

} // namespace qmetric
