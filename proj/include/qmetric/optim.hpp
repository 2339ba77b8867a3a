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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmetric/circuits.hpp"
#include "qmetric/losses.hpp"

namespace qmetric {

enum class OptimMethod { adam, gd };
enum class Direction { maximize, minimize };
enum class GradientKind { shift, finite_diff };

struct OptimConfig {
    OptimMethod method = OptimMethod::adam;
    double learning_rate = 0.02;
    std::size_t iterations = 120;
    std::size_t restarts = 3;
    std::uint64_t seed = 0;
    Direction direction = Direction::maximize;
    GradientKind gradient = GradientKind::shift;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;
inline constexpr double kFiniteDiffStep = 1e-5;

/// Adam, LR 0.02, ITR 120, 3 restarts, maximize.
OptimConfig vtde_defaults(std::uint64_t seed = 0);
/// Adam, LR 0.2, ITR 100, 3 restarts; direction set by the caller.
OptimConfig vfe_defaults(std::uint64_t seed = 0, Direction dir = Direction::maximize);

void validate(const OptimConfig& c);

struct RestartTrace {
    std::vector<double> losses; ///< f(theta_t), t = 0 .. ITR-1
    bool aborted = false;       ///< a non-finite loss stopped this restart
};

struct OptimTrace {
    std::vector<RestartTrace> restarts;
    ParamVector best_theta;
    double best_loss = 0.0;
    std::size_t best_restart = 0;
    std::size_t evaluations = 0;

    [[nodiscard]] bool any_aborted() const;
    [[nodiscard]] std::size_t total_iterations() const;
};

/// Value-plus-gradient callback; the gradient buffer has n_params entries.
using ValueGradFn = std::function<double(std::span<const double>, std::span<double>)>;
using ValueFn = std::function<double(std::span<const double>)>;

struct Objective {
    std::size_t n_params = 0;
    ValueFn value;
    ValueGradFn value_and_gradient; ///< may be empty; finite differences are used then
};

/// 1/2 [f(theta + pi/2 e_j) - f(theta - pi/2 e_j)].
double grad_shift_expectation(const ValueFn& f, std::span<const double> theta, std::size_t j);
std::vector<double> grad_shift_expectation(const ValueFn& f, std::span<const double> theta);

/// d/dtheta_j of L3 = tr[(chi - rho)(chi_+ - chi_-)].
double grad_vqsl_shift(const VqslContext& ctx, std::span<const double> theta, std::size_t j);
double loss_vqsl_and_gradient(const VqslContext& ctx, std::span<const double> theta, std::span<double> grad);

/// d/dtheta_j |L|^2 = 2 Re[conj(L(theta)) 1/2 L(theta_j + pi)].
double grad_overlap_shift(const VfeContext& ctx, std::span<const double> theta, std::size_t j);
/// Returns |L| and fills the gradient of |L| (of |L|^2 when |L| <= 1e-8).
double loss_vfe_and_gradient(const VfeContext& ctx, std::span<const double> theta, std::span<double> grad);

/// Central differences.
std::vector<double> grad_finite_diff(const ValueFn& f, std::span<const double> theta,
                                     double step = kFiniteDiffStep);

/// Runs `restarts` independent runs of `iterations` steps from uniform
/// random starts (restart r draws its start from seed + r).
OptimTrace run_optimizer(const Objective& obj, const OptimConfig& config);

std::string to_string(OptimMethod m);
std::string to_string(Direction d);
std::string to_string(GradientKind g);
nlohmann::json to_json(const OptimConfig& c);
OptimConfig optim_config_from_json(const nlohmann::json& j, OptimConfig base);

/// CSV rows "iteration,restart,loss" for every recorded iterate.
void write_trace_csv(std::ostream& out, const OptimTrace& trace);

} // namespace qmetric
