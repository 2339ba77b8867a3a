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

#include "qmetric/optim.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "qmetric/error.hpp"

namespace qmetric {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_index(std::span<const double> theta, std::size_t j) {
    if (j >= theta.size()) {
        throw RangeError("parameter index " + std::to_string(j) + " out of range for " +
                         std::to_string(theta.size()) + " parameters");
    }
}

bool better(double candidate, double incumbent, Direction d) {
    return d == Direction::maximize ? candidate > incumbent : candidate < incumbent;
}

} // namespace

OptimConfig vtde_defaults(std::uint64_t seed) {
    OptimConfig c;
    c.seed = seed;
    return c;
}

OptimConfig vfe_defaults(std::uint64_t seed, Direction dir) {
    OptimConfig c;
    c.learning_rate = 0.2;
    c.iterations = 100;
    c.seed = seed;
    c.direction = dir;
    return c;
}

void validate(const OptimConfig& c) {
    if (!(c.learning_rate >= 0.0) || !std::isfinite(c.learning_rate)) {
        throw RangeError("learning_rate must be a finite non-negative number");
    }
    if (c.iterations == 0) {
        throw RangeError("iterations must be positive");
    }
    if (c.restarts == 0) {
        throw RangeError("restarts must be positive");
    }
}

bool OptimTrace::any_aborted() const {
    for (const auto& r : restarts) {
        if (r.aborted) {
            return true;
        }
    }
    return false;
}

std::size_t OptimTrace::total_iterations() const {
    std::size_t n = 0;
    for (const auto& r : restarts) {
        n += r.losses.size();
    }
    return n;
}

double grad_shift_expectation(const ValueFn& f, std::span<const double> theta, std::size_t j) {
    check_index(theta, j);
    std::vector<double> t(theta.begin(), theta.end());
    t[j] = theta[j] + kHalfPi;
    const double plus = f(t);
    t[j] = theta[j] - kHalfPi;
    const double minus = f(t);
    return 0.5 * (plus - minus);
}

std::vector<double> grad_shift_expectation(const ValueFn& f, std::span<const double> theta) {
    std::vector<double> g(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        g[j] = grad_shift_expectation(f, theta, j);
    }
    return g;
}

double grad_vqsl_shift(const VqslContext& ctx, std::span<const double> theta, std::size_t j) {
    check_index(theta, j);
    const ComplexMatrix chi = vqsl_marginal(theta, ctx);
    std::vector<double> t(theta.begin(), theta.end());
    t[j] = theta[j] + kHalfPi;
    ComplexMatrix delta = vqsl_marginal(t, ctx);
    t[j] = theta[j] - kHalfPi;
    delta -= vqsl_marginal(t, ctx);
    return trace_product_real(chi - ctx.rho_target.matrix(), delta);
}

double loss_vqsl_and_gradient(const VqslContext& ctx, std::span<const double> theta, std::span<double> grad) {
    if (grad.size() != theta.size()) {
        throw DimensionError("gradient buffer has the wrong size");
    }
    const ComplexMatrix chi = vqsl_marginal(theta, ctx);
    const ComplexMatrix resid = chi - ctx.rho_target.matrix();
    std::vector<double> t(theta.begin(), theta.end());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        t[j] = theta[j] + kHalfPi;
        ComplexMatrix delta = vqsl_marginal(t, ctx);
        t[j] = theta[j] - kHalfPi;
        delta -= vqsl_marginal(t, ctx);
        t[j] = theta[j];
        grad[j] = trace_product_real(resid, delta);
    }
    return trace_product_real(chi, chi) - 2.0 * trace_product_real(ctx.rho_target.matrix(), chi);
}

double grad_overlap_shift(const VfeContext& ctx, std::span<const double> theta, std::size_t j) {
    check_index(theta, j);
    const Complex l = vfe_amplitude(theta, ctx);
    std::vector<double> t(theta.begin(), theta.end());
    t[j] = theta[j] + std::numbers::pi;
    const Complex shifted = vfe_amplitude(t, ctx);
    return 2.0 * (std::conj(l) * 0.5 * shifted).real();
}

double loss_vfe_and_gradient(const VfeContext& ctx, std::span<const double> theta, std::span<double> grad) {
    if (grad.size() != theta.size()) {
        throw DimensionError("gradient buffer has the wrong size");
    }
    const Complex l = vfe_amplitude(theta, ctx);
    const double mag = std::abs(l);
    const double denom = mag > 1e-8 ? 2.0 * mag : 1.0;
    std::vector<double> t(theta.begin(), theta.end());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        t[j] = theta[j] + std::numbers::pi;
        const Complex shifted = vfe_amplitude(t, ctx);
        t[j] = theta[j];
        grad[j] = (std::conj(l) * shifted).real() / denom;
    }
    return mag;
}

std::vector<double> grad_finite_diff(const ValueFn& f, std::span<const double> theta, double step) {
    std::vector<double> t(theta.begin(), theta.end());
    std::vector<double> g(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        t[j] = theta[j] + step;
        const double plus = f(t);
        t[j] = theta[j] - step;
        const double minus = f(t);
        t[j] = theta[j];
        g[j] = (plus - minus) / (2.0 * step);
    }
    return g;
}

OptimTrace run_optimizer(const Objective& obj, const OptimConfig& config) {
    validate(config);
    if (!obj.value) {
        throw DimensionError("objective has no value function");
    }
    const bool use_shift = config.gradient == GradientKind::shift && obj.value_and_gradient;
    const double sign = config.direction == Direction::maximize ? 1.0 : -1.0;
    const std::size_t n = obj.n_params;

    OptimTrace trace;
    trace.best_loss = config.direction == Direction::maximize ? -std::numeric_limits<double>::infinity()
                                                              : std::numeric_limits<double>::infinity();
    bool have_best = false;
    std::vector<double> grad(n);
    std::vector<double> m(n);
    std::vector<double> v(n);

    for (std::size_t r = 0; r < config.restarts; ++r) {
        Rng rng(config.seed + r);
        ParamVector theta = random_params(n, rng);
        std::fill(m.begin(), m.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        RestartTrace rt;
        rt.losses.reserve(config.iterations);
        double b1t = 1.0;
        double b2t = 1.0;

        for (std::size_t it = 0; it < config.iterations; ++it) {
            double f = 0.0;
            if (use_shift) {
                f = obj.value_and_gradient(theta, grad);
            } else {
                f = obj.value(theta);
                grad = grad_finite_diff(obj.value, theta);
            }
            ++trace.evaluations;
            bool finite = std::isfinite(f);
            for (double g : grad) {
                finite = finite && std::isfinite(g);
            }
            if (!finite) {
                rt.aborted = true;
                break;
            }
            rt.losses.push_back(f);
            if (!have_best || better(f, trace.best_loss, config.direction)) {
                have_best = true;
                trace.best_loss = f;
                trace.best_theta = theta;
                trace.best_restart = r;
            }

            if (config.method == OptimMethod::gd) {
                for (std::size_t j = 0; j < n; ++j) {
                    theta[j] += sign * config.learning_rate * grad[j];
                }
                continue;
            }
            b1t *= kAdamBeta1;
            b2t *= kAdamBeta2;
            for (std::size_t j = 0; j < n; ++j) {
                m[j] = kAdamBeta1 * m[j] + (1.0 - kAdamBeta1) * grad[j];
                v[j] = kAdamBeta2 * v[j] + (1.0 - kAdamBeta2) * grad[j] * grad[j];
                const double mhat = m[j] / (1.0 - b1t);
                const double vhat = v[j] / (1.0 - b2t);
                theta[j] += sign * config.learning_rate * mhat / (std::sqrt(vhat) + kAdamEps);
            }
        }
        trace.restarts.push_back(std::move(rt));
    }
    if (!have_best) {
        throw InvariantViolation("every restart produced a non-finite loss");
    }
    return trace;
}

std::string to_string(OptimMethod m) { return m == OptimMethod::adam ? "adam" : "gd"; }
std::string to_string(Direction d) { return d == Direction::maximize ? "maximize" : "minimize"; }
std::string to_string(GradientKind g) { return g == GradientKind::shift ? "shift" : "finite_diff"; }

nlohmann::json to_json(const OptimConfig& c) {
    return {{"method", to_string(c.method)},
            {"learning_rate", c.learning_rate},
            {"iterations", c.iterations},
            {"restarts", c.restarts},
            {"seed", c.seed},
            {"direction", to_string(c.direction)},
            {"gradient", to_string(c.gradient)}};
}

OptimConfig optim_config_from_json(const nlohmann::json& j, OptimConfig base) {
    if (!j.is_object()) {
        throw DimensionError("optimizer config must be an object");
    }
    for (const auto& [key, val] : j.items()) {
        if (key == "method") {
            const auto s = val.get<std::string>();
            if (s == "adam") {
                base.method = OptimMethod::adam;
            } else if (s == "gd") {
                base.method = OptimMethod::gd;
            } else {
                throw DimensionError("field 'method': expected adam or gd, got '" + s + "'");
            }
        } else if (key == "learning_rate") {
            base.learning_rate = val.get<double>();
        } else if (key == "iterations") {
            base.iterations = val.get<std::size_t>();
        } else if (key == "restarts") {
            base.restarts = val.get<std::size_t>();
        } else if (key == "seed") {
            base.seed = val.get<std::uint64_t>();
        } else if (key == "direction") {
            const auto s = val.get<std::string>();
            if (s != "maximize" && s != "minimize") {
                throw DimensionError("field 'direction': expected maximize or minimize");
            }
            base.direction = s == "maximize" ? Direction::maximize : Direction::minimize;
        } else if (key == "gradient") {
            const auto s = val.get<std::string>();
            if (s != "shift" && s != "finite_diff") {
                throw DimensionError("field 'gradient': expected shift or finite_diff");
            }
            base.gradient = s == "shift" ? GradientKind::shift : GradientKind::finite_diff;
        } else {
            throw DimensionError("unknown optimizer field '" + key + "'");
        }
    }
    validate(base);
    return base;
}

void write_trace_csv(std::ostream& out, const OptimTrace& trace) {
    out << "iteration,restart,loss\n";
    char buf[64];
    for (std::size_t r = 0; r < trace.restarts.size(); ++r) {
        const auto& losses = trace.restarts[r].losses;
        for (std::size_t i = 0; i < losses.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.12g", losses[i]);
            out << i << ',' << r << ',' << buf << '\n';
        }
    }
}

} // namespace qmetric
