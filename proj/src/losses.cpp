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

#include "qmetric/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qmetric/error.hpp"

namespace qmetric {

namespace {

void check_params(const AnsatzSpec& a, std::span<const double> theta) {
    if (theta.size() != param_count(a)) {
        throw DimensionError("expected " + std::to_string(param_count(a)) + " parameters, got " +
                             std::to_string(theta.size()));
    }
}

void check_ancilla_layout(const AnsatzSpec& a, int system_qubits) {
    if (a.n_qubits != system_qubits + 1) {
        throw DimensionError("ansatz must cover " + std::to_string(system_qubits) +
                             " system qubits plus one ancilla, got " + std::to_string(a.n_qubits));
    }
}

Rng& require_rng(Rng* rng) {
    if (rng == nullptr) {
        throw RangeError("shot-based evaluation requires an RNG");
    }
    return *rng;
}

double evolved_ancilla_zero(const ComplexMatrix& state, const AnsatzSpec& a,
                            const std::vector<GateSpec>& gates, std::span<const double> theta) {
    ComplexMatrix m = append_zero_ancilla(state);
    conjugate_gates(m, a.n_qubits, gates, theta);
    return proj0_expectation(m, a.n_qubits, a.n_qubits - 1);
}

} // namespace

HermitianDecomposition::HermitianDecomposition(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) {
        throw RangeError("Hermitian decomposition needs at least one term");
    }
    const int n = terms_.front().state.n_qubits();
    for (const auto& t : terms_) {
        if (t.state.n_qubits() != n) {
            throw DimensionError("Hermitian decomposition mixes qubit counts");
        }
        if (!std::isfinite(t.coefficient)) {
            throw InvariantViolation("Hermitian decomposition has a non-finite coefficient");
        }
    }
}

double HermitianDecomposition::coefficient_sum() const {
    double s = 0.0;
    for (const auto& t : terms_) {
        s += t.coefficient;
    }
    return s;
}

ComplexMatrix HermitianDecomposition::reconstruct() const {
    ComplexMatrix h(terms_.front().state.dim(), terms_.front().state.dim());
    for (const auto& t : terms_) {
        h += t.state.matrix() * Complex{t.coefficient};
    }
    return h;
}

ComplexMatrix append_zero_ancilla(const ComplexMatrix& m) {
    const std::size_t d = m.rows();
    ComplexMatrix out(2 * d, 2 * d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            out(2 * r, 2 * c) = m(r, c);
        }
    }
    return out;
}

double proj0_expectation(const ComplexMatrix& m, int n_qubits, int qubit) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw RangeError("projector qubit index " + std::to_string(qubit) + " out of range");
    }
    if (m.rows() != (std::size_t{1} << n_qubits)) {
        throw DimensionError("operator size does not match register");
    }
    const std::size_t bit = std::size_t{1} << (n_qubits - 1 - qubit);
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (!(i & bit)) {
            acc += m(i, i).real();
        }
    }
    return acc;
}

double expect_proj0_ancilla(const DensityMatrix& rho_ar, int ancilla_index) {
    return proj0_expectation(rho_ar.matrix(), rho_ar.n_qubits(), ancilla_index);
}

double sample_probability(double p, std::uint64_t shots, Rng& rng) {
    if (shots == 0) {
        throw RangeError("shot count must be positive");
    }
    const double clamped = std::clamp(p, 0.0, 1.0);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < shots; ++s) {
        hits += rng.bernoulli(clamped) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(shots);
}

double swap_test_estimate(double overlap, std::uint64_t shots, Rng& rng) {
    return 2.0 * sample_probability(0.5 * (1.0 + overlap), shots, rng) - 1.0;
}

double overlap_hs(const DensityMatrix& a, const DensityMatrix& b, Shots shots, Rng* rng) {
    if (a.dim() != b.dim()) {
        throw DimensionError("overlap_hs: dimension mismatch");
    }
    const double exact = trace_product_real(a.matrix(), b.matrix());
    if (!shots) {
        return exact;
    }
    return swap_test_estimate(exact, *shots, require_rng(rng));
}

Complex overlap_pure(const StateVector& psi, const StateVector& phi) {
    if (psi.dim() != phi.dim()) {
        throw DimensionError("overlap_pure: dimension mismatch");
    }
    Complex acc{0.0, 0.0};
    const auto a = psi.amplitudes();
    const auto b = phi.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

double loss_vtde(std::span<const double> theta, const VtdeContext& ctx, Rng* rng) {
    if (ctx.rho.n_qubits() != ctx.sigma.n_qubits()) {
        throw DimensionError("loss_vtde: rho and sigma have different qubit counts");
    }
    check_ancilla_layout(ctx.ansatz, ctx.rho.n_qubits());
    check_params(ctx.ansatz, theta);
    const auto gates = ansatz_gates(ctx.ansatz);
    double o_rho = evolved_ancilla_zero(ctx.rho.matrix(), ctx.ansatz, gates, theta);
    double o_sigma = evolved_ancilla_zero(ctx.sigma.matrix(), ctx.ansatz, gates, theta);
    if (ctx.shots) {
        Rng& r = require_rng(rng);
        o_rho = sample_probability(o_rho, *ctx.shots, r);
        o_sigma = sample_probability(o_sigma, *ctx.shots, r);
    }
    return o_rho - o_sigma;
}

double loss_trace_norm(std::span<const double> theta, const TraceNormContext& ctx, Rng* rng) {
    check_ancilla_layout(ctx.ansatz, ctx.decomp.n_qubits());
    check_params(ctx.ansatz, theta);
    const auto gates = ansatz_gates(ctx.ansatz);
    double weighted = 0.0;
    for (const auto& term : ctx.decomp.terms()) {
        double o = evolved_ancilla_zero(term.state.matrix(), ctx.ansatz, gates, theta);
        if (ctx.shots) {
            o = sample_probability(o, *ctx.shots, require_rng(rng));
        }
        weighted += term.coefficient * o;
    }
    return 2.0 * weighted - ctx.decomp.coefficient_sum();
}

Complex vfe_amplitude(std::span<const double> theta, const VfeContext& ctx) {
    if (ctx.psi.dim() != ctx.phi.dim()) {
        throw DimensionError("loss_vfe: purifications have different dimensions");
    }
    const int total = ctx.psi.n_qubits();
    const int n_r = ctx.ansatz.n_qubits;
    if (n_r >= total) {
        throw DimensionError("loss_vfe: ancilla ansatz must leave at least one system qubit");
    }
    check_params(ctx.ansatz, theta);
    const auto gates = offset_qubits(ansatz_gates(ctx.ansatz), total - n_r);
    std::vector<Complex> phi(ctx.phi.amplitudes().begin(), ctx.phi.amplitudes().end());
    apply_gates(phi, total, gates, theta);
    const auto psi = ctx.psi.amplitudes();
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < phi.size(); ++i) {
        acc += std::conj(psi[i]) * phi[i];
    }
    return acc;
}

double loss_vfe(std::span<const double> theta, const VfeContext& ctx, Rng* rng) {
    const double mag = std::abs(vfe_amplitude(theta, ctx));
    if (!ctx.shots) {
        return mag;
    }
    const double sq = swap_test_estimate(mag * mag, *ctx.shots, require_rng(rng));
    return std::sqrt(std::max(sq, 0.0));
}

StateVector vqsl_state(std::span<const double> theta, const VqslContext& ctx) {
    check_params(ctx.ansatz, theta);
    if (ctx.ansatz.n_qubits <= ctx.rho_target.n_qubits()) {
        throw DimensionError("VQSL ansatz must cover the system plus at least one ancilla qubit");
    }
    std::vector<Complex> amp(std::size_t{1} << ctx.ansatz.n_qubits, Complex{0.0, 0.0});
    amp[0] = 1.0;
    const auto gates = ansatz_gates(ctx.ansatz);
    apply_gates(amp, ctx.ansatz.n_qubits, gates, theta);
    double norm2 = 0.0;
    for (const auto& z : amp) {
        norm2 += std::norm(z);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& z : amp) {
        z *= inv;
    }
    return StateVector::from_amplitudes(std::move(amp));
}

ComplexMatrix vqsl_marginal(std::span<const double> theta, const VqslContext& ctx) {
    return reduced_density(vqsl_state(theta, ctx), ctx.rho_target.n_qubits()).matrix();
}

double loss_vqsl(std::span<const double> theta, const VqslContext& ctx, Rng* rng) {
    const ComplexMatrix chi = vqsl_marginal(theta, ctx);
    double purity = trace_product_real(chi, chi);
    double overlap = trace_product_real(ctx.rho_target.matrix(), chi);
    if (ctx.shots) {
        Rng& r = require_rng(rng);
        purity = swap_test_estimate(purity, *ctx.shots, r);
        overlap = swap_test_estimate(overlap, *ctx.shots, r);
    }
    return purity - 2.0 * overlap;
}

double loss_nvtde(std::span<const double> theta, const NvtdeContext& ctx) {
    if (ctx.rho.n_qubits() != ctx.sigma.n_qubits()) {
        throw DimensionError("loss_nvtde: rho and sigma have different qubit counts");
    }
    if (ctx.ansatz.n_qubits != ctx.rho.n_qubits()) {
        throw DimensionError("loss_nvtde: ansatz must act on the system register only");
    }
    if (ctx.k < 1 || ctx.k >= ctx.rho.dim()) {
        throw RangeError("loss_nvtde: k = " + std::to_string(ctx.k) + " outside [1, " +
                         std::to_string(ctx.rho.dim() - 1) + "]");
    }
    check_params(ctx.ansatz, theta);
    const auto gates = ansatz_gates(ctx.ansatz);
    ComplexMatrix a = ctx.rho.matrix();
    ComplexMatrix b = ctx.sigma.matrix();
    conjugate_gates(a, ctx.ansatz.n_qubits, gates, theta);
    conjugate_gates(b, ctx.ansatz.n_qubits, gates, theta);
    double acc = 0.0;
    for (std::size_t j = 0; j < ctx.k; ++j) {
        acc += a(j, j).real() - b(j, j).real();
    }
    return acc;
}

ConjugatedExpectation::ConjugatedExpectation(AnsatzSpec ansatz, ComplexMatrix input,
                                             std::vector<double> observable_diag, double scale,
                                             double offset)
    : ansatz_(ansatz),
      gates_(ansatz_gates(ansatz)),
      input_(std::move(input)),
      observable_(std::move(observable_diag)),
      scale_(scale),
      offset_(offset),
      n_params_(param_count(ansatz)) {
    const std::size_t dim = std::size_t{1} << ansatz_.n_qubits;
    if (input_.rows() != dim || !input_.is_square() || observable_.size() != dim) {
        throw DimensionError("ConjugatedExpectation: operand sizes do not match the ansatz register");
    }
}

double ConjugatedExpectation::value(std::span<const double> theta) const {
    check_params(ansatz_, theta);
    ComplexMatrix m = input_;
    conjugate_gates(m, ansatz_.n_qubits, gates_, theta);
    double acc = 0.0;
    for (std::size_t i = 0; i < observable_.size(); ++i) {
        acc += observable_[i] * m(i, i).real();
    }
    return scale_ * acc + offset_;
}

double ConjugatedExpectation::value_and_gradient(std::span<const double> theta, std::span<double> grad) const {
    check_params(ansatz_, theta);
    if (grad.size() != n_params_) {
        throw DimensionError("gradient buffer has the wrong size");
    }
    const int n = ansatz_.n_qubits;

    // Forward pass: keep the operator entering each parametrized gate.
    std::vector<ComplexMatrix> before;
    before.reserve(n_params_);
    std::vector<std::size_t> gate_slot(gates_.size(), 0);
    ComplexMatrix m = input_;
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        if (gates_[i].param >= 0) {
            gate_slot[i] = before.size();
            before.push_back(m);
        }
        conjugate_gate(m, n, gates_[i], theta);
    }
    double value = 0.0;
    for (std::size_t i = 0; i < observable_.size(); ++i) {
        value += observable_[i] * m(i, i).real();
    }

    // Backward pass: observable in the Heisenberg picture after gate i.
    ComplexMatrix obs = ComplexMatrix::diagonal(std::span<const double>(observable_));
    std::vector<double> shifted(theta.begin(), theta.end());
    constexpr double kShift = std::numbers::pi / 2.0;
    for (std::size_t i = gates_.size(); i-- > 0;) {
        const GateSpec& g = gates_[i];
        if (g.param >= 0) {
            const auto j = static_cast<std::size_t>(g.param);
            const ComplexMatrix& pre = before[gate_slot[i]];
            shifted[j] = theta[j] + kShift;
            const double plus = conjugated_trace(obs, pre, n, g.target, single_qubit_matrix(g, shifted));
            shifted[j] = theta[j] - kShift;
            const double minus = conjugated_trace(obs, pre, n, g.target, single_qubit_matrix(g, shifted));
            shifted[j] = theta[j];
            grad[j] = scale_ * 0.5 * (plus - minus);
        }
        conjugate_gate_adjoint(obs, n, g, theta);
    }
    return scale_ * value + offset_;
}

std::vector<double> ancilla_zero_indicator(int n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<double> diag(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        diag[i] = (i & 1u) ? 0.0 : 1.0;
    }
    return diag;
}

ConjugatedExpectation make_vtde_expectation(const VtdeContext& ctx) {
    if (ctx.rho.n_qubits() != ctx.sigma.n_qubits()) {
        throw DimensionError("VTDE: rho and sigma have different qubit counts");
    }
    check_ancilla_layout(ctx.ansatz, ctx.rho.n_qubits());
    return {ctx.ansatz, append_zero_ancilla(ctx.rho.matrix() - ctx.sigma.matrix()),
            ancilla_zero_indicator(ctx.ansatz.n_qubits)};
}

ConjugatedExpectation make_trace_norm_expectation(const TraceNormContext& ctx) {
    check_ancilla_layout(ctx.ansatz, ctx.decomp.n_qubits());
    return {ctx.ansatz, append_zero_ancilla(ctx.decomp.reconstruct()),
            ancilla_zero_indicator(ctx.ansatz.n_qubits), 2.0, -ctx.decomp.coefficient_sum()};
}

ConjugatedExpectation make_nvtde_expectation(const NvtdeContext& ctx) {
    if (ctx.ansatz.n_qubits != ctx.rho.n_qubits() || ctx.rho.n_qubits() != ctx.sigma.n_qubits()) {
        throw DimensionError("nVTDE: ansatz, rho and sigma must share one register");
    }
    if (ctx.k < 1 || ctx.k >= ctx.rho.dim()) {
        throw RangeError("nVTDE: k outside [1, 2^n - 1]");
    }
    std::vector<double> diag(ctx.rho.dim(), 0.0);
    std::fill(diag.begin(), diag.begin() + static_cast<std::ptrdiff_t>(ctx.k), 1.0);
    return {ctx.ansatz, ctx.rho.matrix() - ctx.sigma.matrix(), std::move(diag)};
}

} // namespace qmetric
