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

#include "qmetric/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qmetric/error.hpp"
#include "qmetric/oracles.hpp"

namespace qmetric {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Objective expectation_objective(const ConjugatedExpectation& e) {
    Objective obj;
    obj.n_params = e.n_params();
    obj.value = [&e](std::span<const double> t) { return e.value(t); };
    obj.value_and_gradient = [&e](std::span<const double> t, std::span<double> g) {
        return e.value_and_gradient(t, g);
    };
    return obj;
}

nlohmann::json shots_json(const Shots& s) {
    return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

nlohmann::json vtde_config(const VtdeOptions& o, int n_qubits) {
    return {{"ansatz", to_json(AnsatzSpec{o.family, n_qubits, o.depth})},
            {"optimizer", to_json(o.opt)},
            {"shots", shots_json(o.shots)}};
}

std::uint64_t shot_seed(const OptimConfig& c) { return derive_seed(c.seed, 0x5707); }

OptimConfig with_seed(OptimConfig c, std::uint64_t seed) {
    c.seed = seed;
    return c;
}

} // namespace

void EstimateResult::set_oracle(double value) {
    oracle = value;
    abs_error = std::abs(estimate - value);
    if (std::abs(value) > 1e-12) {
        rel_error = *abs_error / std::abs(value);
    } else {
        rel_error.reset();
    }
}

std::size_t EstimateResult::iterations() const {
    std::size_t n = 0;
    for (const auto& t : traces) {
        n += t.total_iterations();
    }
    return n;
}

bool EstimateResult::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

bool EstimateResult::one_sided(double tol) const {
    return !variational_bound || estimate <= *variational_bound + tol;
}

nlohmann::json to_json(const EstimateResult& r) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json stages = nlohmann::json::array();
    for (std::size_t i = 0; i < r.traces.size(); ++i) {
        stages.push_back({{"name", i < r.stage_names.size() ? r.stage_names[i] : std::to_string(i)},
                          {"best_loss", r.traces[i].best_loss},
                          {"best_restart", r.traces[i].best_restart},
                          {"iterations", r.traces[i].total_iterations()}});
    }
    return {{"algorithm", r.algorithm},  {"estimate", r.estimate},   {"oracle", opt(r.oracle)},
            {"abs_error", opt(r.abs_error)}, {"rel_error", opt(r.rel_error)},
            {"variational_bound", opt(r.variational_bound)}, {"stages", stages},
            {"config", r.config},        {"flags", r.flags}};
}

EstimateResult vtde(const DensityMatrix& rho, const DensityMatrix& sigma, const VtdeOptions& opts) {
    const auto t0 = Clock::now();
    if (rho.n_qubits() != sigma.n_qubits()) {
        throw DimensionError("vtde: rho has " + std::to_string(rho.n_qubits()) + " qubits, sigma has " +
                             std::to_string(sigma.n_qubits()));
    }
    OptimConfig opt = opts.opt;
    opt.direction = Direction::maximize;
    const VtdeContext ctx{AnsatzSpec{opts.family, rho.n_qubits() + 1, opts.depth}, rho, sigma, {}};
    const ConjugatedExpectation e = make_vtde_expectation(ctx);
    OptimTrace trace = run_optimizer(expectation_objective(e), opt);

    EstimateResult r;
    r.algorithm = "vtde";
    double best = trace.best_loss;
    if (opts.shots) {
        Rng rng(shot_seed(opt));
        VtdeContext shot_ctx = ctx;
        shot_ctx.shots = opts.shots;
        best = loss_vtde(trace.best_theta, shot_ctx, &rng);
    }
    if (best < 0.0) {
        r.flags.push_back("negative_optimum");
    }
    if (trace.any_aborted()) {
        r.flags.push_back("aborted_restart");
    }
    r.estimate = std::max(best, 0.0);
    r.stage_names = {"vtde"};
    r.traces.push_back(std::move(trace));
    r.config = vtde_config(opts, rho.n_qubits() + 1);
    r.config["optimizer"] = to_json(opt);
    r.set_oracle(exact_trace_distance(rho, sigma));
    if (!opts.shots) {
        r.variational_bound = r.oracle;
    }
    r.wall_time = seconds_since(t0);
    return r;
}

EstimateResult trace_norm_estimate(const HermitianDecomposition& decomp, const VtdeOptions& opts) {
    const auto t0 = Clock::now();
    OptimConfig opt = opts.opt;
    opt.direction = Direction::maximize;
    const TraceNormContext ctx{AnsatzSpec{opts.family, decomp.n_qubits() + 1, opts.depth}, decomp, {}};
    const ConjugatedExpectation e = make_trace_norm_expectation(ctx);
    OptimTrace trace = run_optimizer(expectation_objective(e), opt);

    EstimateResult r;
    r.algorithm = "trace_norm";
    r.estimate = trace.best_loss;
    if (opts.shots) {
        Rng rng(shot_seed(opt));
        TraceNormContext shot_ctx = ctx;
        shot_ctx.shots = opts.shots;
        r.estimate = loss_trace_norm(trace.best_theta, shot_ctx, &rng);
    }
    if (trace.any_aborted()) {
        r.flags.push_back("aborted_restart");
    }
    r.stage_names = {"trace_norm"};
    r.traces.push_back(std::move(trace));
    r.config = vtde_config(opts, decomp.n_qubits() + 1);
    r.config["optimizer"] = to_json(opt);
    r.config["terms"] = decomp.terms().size();
    r.set_oracle(trace_norm(decomp.reconstruct()));
    if (!opts.shots) {
        r.variational_bound = r.oracle;
    }
    r.wall_time = seconds_since(t0);
    return r;
}

EstimateResult trace_norm_two_sided(const ComplexMatrix& h, const VtdeOptions& opts) {
    const auto t0 = Clock::now();
    if (opts.shots) {
        throw RangeError("trace_norm_two_sided has no shot model; use trace_norm_estimate with a decomposition");
    }
    const ComplexMatrix herm = symmetrized(h);
    const int n = qubits_for_dim(herm.rows());
    const AnsatzSpec ansatz{opts.family, n + 1, opts.depth};
    const ConjugatedExpectation plus(ansatz, append_zero_ancilla(herm), ancilla_zero_indicator(n + 1));
    const ConjugatedExpectation minus(ansatz, append_zero_ancilla(-herm), ancilla_zero_indicator(n + 1));
    OptimConfig opt_plus = opts.opt;
    opt_plus.direction = Direction::maximize;
    OptimConfig opt_minus = with_seed(opt_plus, derive_seed(opt_plus.seed, 1));

    EstimateResult r;
    r.algorithm = "trace_norm_two_sided";
    r.traces.push_back(run_optimizer(expectation_objective(plus), opt_plus));
    r.traces.push_back(run_optimizer(expectation_objective(minus), opt_minus));
    r.stage_names = {"plus", "minus"};
    r.estimate = r.traces[0].best_loss + r.traces[1].best_loss;
    for (const auto& t : r.traces) {
        if (t.any_aborted()) {
            r.flags.push_back("aborted_restart");
            break;
        }
    }
    r.config = vtde_config(opts, n + 1);
    r.config["optimizer"] = to_json(opt_plus);
    r.set_oracle(trace_norm(herm));
    r.variational_bound = r.oracle;
    r.wall_time = seconds_since(t0);
    return r;
}

VqslResult vqsl(const DensityMatrix& rho, const VqslOptions& opts) {
    if (opts.n_r < 1) {
        throw RangeError("vqsl needs at least one ancilla qubit");
    }
    OptimConfig opt = opts.opt;
    opt.direction = Direction::minimize;
    const VqslContext ctx{AnsatzSpec{opts.family, rho.n_qubits() + opts.n_r, opts.depth}, rho, {}};
    Objective obj;
    obj.n_params = param_count(ctx.ansatz);
    obj.value = [&ctx](std::span<const double> t) { return loss_vqsl(t, ctx); };
    obj.value_and_gradient = [&ctx](std::span<const double> t, std::span<double> g) {
        return loss_vqsl_and_gradient(ctx, t, g);
    };
    OptimTrace trace = run_optimizer(obj, opt);
    StateVector psi = vqsl_state(trace.best_theta, ctx);
    const DensityMatrix chi = reduced_density(psi, rho.n_qubits());
    double best_loss = trace.best_loss;
    if (opts.shots) {
        Rng rng(shot_seed(opt));
        VqslContext shot_ctx = ctx;
        shot_ctx.shots = opts.shots;
        best_loss = loss_vqsl(trace.best_theta, shot_ctx, &rng);
    }
    return VqslResult{std::move(psi), exact_fidelity(rho, chi),
                      purification_fidelity_bound(rho, std::size_t{1} << opts.n_r), best_loss,
                      std::move(trace)};
}

EstimateResult vfe(const DensityMatrix& rho, const DensityMatrix& sigma, const VfeOptions& opts) {
    const auto t0 = Clock::now();
    if (rho.n_qubits() != sigma.n_qubits()) {
        throw DimensionError("vfe: rho has " + std::to_string(rho.n_qubits()) + " qubits, sigma has " +
                             std::to_string(sigma.n_qubits()));
    }
    const int n_a = rho.n_qubits();
    const int n_r = opts.n_r == 0 ? n_a : opts.n_r;
    if (n_r < 1) {
        throw RangeError("vfe needs at least one ancilla qubit");
    }

    EstimateResult r;
    r.algorithm = "vfe";
    std::optional<StateVector> psi;
    std::optional<StateVector> phi;
    nlohmann::json purify_cfg;
    if (opts.mode == PurificationMode::exact) {
        psi = purify_exact(rho, n_r);
        phi = purify_exact(sigma, n_r);
    } else {
        VqslOptions vo;
        vo.n_r = n_r;
        vo.depth = opts.purify_depth;
        vo.opt = opts.opt_purify;
        VqslResult a = vqsl(rho, vo);
        vo.opt.seed = derive_seed(opts.opt_purify.seed, 1);
        VqslResult b = vqsl(sigma, vo);
        psi = std::move(a.purification);
        phi = std::move(b.purification);
        r.stage_names = {"vqsl_rho", "vqsl_sigma"};
        r.traces.push_back(std::move(a.trace));
        r.traces.push_back(std::move(b.trace));
        purify_cfg = {{"ansatz", to_json(AnsatzSpec{vo.family, n_a + n_r, vo.depth})},
                      {"optimizer", to_json(with_seed(opts.opt_purify, opts.opt_purify.seed))}};
        purify_cfg["optimizer"]["direction"] = "minimize";
    }

    OptimConfig opt = opts.opt_fid;
    opt.direction = Direction::maximize;
    const VfeContext ctx{AnsatzSpec{AnsatzFamily::hardware_efficient, n_r, opts.fidelity_depth}, *psi, *phi, {}};
    Objective obj;
    obj.n_params = param_count(ctx.ansatz);
    obj.value = [&ctx](std::span<const double> t) { return loss_vfe(t, ctx); };
    obj.value_and_gradient = [&ctx](std::span<const double> t, std::span<double> g) {
        return loss_vfe_and_gradient(ctx, t, g);
    };
    OptimTrace trace = run_optimizer(obj, opt);
    r.estimate = trace.best_loss;
    if (opts.shots) {
        Rng rng(shot_seed(opt));
        VfeContext shot_ctx = ctx;
        shot_ctx.shots = opts.shots;
        r.estimate = loss_vfe(trace.best_theta, shot_ctx, &rng);
    }
    r.stage_names.push_back("fidelity");
    r.traces.push_back(std::move(trace));
    for (const auto& t : r.traces) {
        if (t.any_aborted()) {
            r.flags.push_back("aborted_restart");
            break;
        }
    }
    r.config = {{"mode", to_string(opts.mode)},
                {"n_r", n_r},
                {"purification", purify_cfg},
                {"fidelity", {{"ansatz", to_json(ctx.ansatz)}, {"optimizer", to_json(opt)}}},
                {"shots", shots_json(opts.shots)}};
    r.set_oracle(exact_fidelity(rho, sigma));
    if (!opts.shots) {
        r.variational_bound = opts.mode == PurificationMode::exact
                                  ? *r.oracle
                                  : exact_fidelity(reduced_density(*psi, n_a), reduced_density(*phi, n_a));
    }
    r.wall_time = seconds_since(t0);
    return r;
}

NvtdeResult nvtde(const DensityMatrix& rho, const DensityMatrix& sigma, const NvtdeOptions& opts) {
    const auto t0 = Clock::now();
    if (rho.n_qubits() != sigma.n_qubits()) {
        throw DimensionError("nvtde: rho and sigma have different qubit counts");
    }
    const std::size_t k_max = rho.dim() - 1;
    if (opts.fixed_k && (*opts.fixed_k < 1 || *opts.fixed_k > k_max)) {
        throw RangeError("nvtde: fixed k outside [1, 2^n - 1]");
    }
    const AnsatzSpec ansatz{opts.family, rho.n_qubits(), opts.depth};
    NvtdeResult out;
    EstimateResult& r = out.result;
    r.algorithm = "nvtde";
    double best = -1.0;
    const std::size_t k_first = opts.fixed_k.value_or(1);
    const std::size_t k_last = opts.fixed_k.value_or(k_max);
    for (std::size_t k = k_first; k <= k_last; ++k) {
        const NvtdeContext ctx{ansatz, rho, sigma, k};
        const ConjugatedExpectation e = make_nvtde_expectation(ctx);
        OptimConfig opt = with_seed(opts.opt, derive_seed(opts.opt.seed, k));
        opt.direction = Direction::maximize;
        OptimTrace trace = run_optimizer(expectation_objective(e), opt);
        const double value = trace.best_loss;
        const bool stalled = !out.k_profile.empty() && value <= out.k_profile.back() + opts.eps_k;
        out.k_profile.push_back(value);
        r.stage_names.push_back("k=" + std::to_string(k));
        r.traces.push_back(std::move(trace));
        if (value > best) {
            best = value;
            out.best_k = k;
        }
        if (stalled) {
            break;
        }
    }
    if (best < 0.0) {
        r.flags.push_back("negative_optimum");
    }
    r.estimate = std::max(best, 0.0);
    r.config = {{"ansatz", to_json(ansatz)},
                {"optimizer", to_json(opts.opt)},
                {"eps_k", opts.eps_k},
                {"fixed_k", opts.fixed_k ? nlohmann::json(*opts.fixed_k) : nlohmann::json(nullptr)}};
    r.set_oracle(exact_trace_distance(rho, sigma));
    r.variational_bound = opts.fixed_k ? std::max(top_k_eig_sum(rho.matrix() - sigma.matrix(), *opts.fixed_k), 0.0)
                                       : *r.oracle;
    r.wall_time = seconds_since(t0);
    return out;
}

std::string to_string(PurificationMode m) { return m == PurificationMode::vqsl ? "vqsl" : "exact"; }

} // namespace qmetric
