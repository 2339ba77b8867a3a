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

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qmetric/circuits.hpp"
#include "qmetric/linalg.hpp"
#include "qmetric/rng.hpp"
#include "qmetric/states.hpp"

namespace qmetric {

/// H = sum_j c_j rho_j with real coefficients and states on a common register.
class HermitianDecomposition {
  public:
    struct Term {
        double coefficient;
        DensityMatrix state;
    };

    explicit HermitianDecomposition(std::vector<Term> terms);

    [[nodiscard]] std::span<const Term> terms() const noexcept { return terms_; }
    [[nodiscard]] int n_qubits() const noexcept { return terms_.front().state.n_qubits(); }
    [[nodiscard]] double coefficient_sum() const;
    [[nodiscard]] ComplexMatrix reconstruct() const;

  private:
    std::vector<Term> terms_;
};

/// Optional finite-shot measurement model. Absent means exact expectations.
using Shots = std::optional<std::uint64_t>;

struct VtdeContext {
    AnsatzSpec ansatz; ///< covers the system plus one trailing ancilla qubit
    DensityMatrix rho;
    DensityMatrix sigma;
    Shots shots;
};

struct TraceNormContext {
    AnsatzSpec ansatz; ///< covers the system plus one trailing ancilla qubit
    HermitianDecomposition decomp;
    Shots shots;
};

struct VfeContext {
    AnsatzSpec ansatz; ///< acts on the trailing n_R qubits only
    StateVector psi;   ///< purification of rho on A R
    StateVector phi;   ///< purification of sigma on A R
    Shots shots;
};

struct VqslContext {
    AnsatzSpec ansatz; ///< covers A and R
    DensityMatrix rho_target;
    Shots shots;
};

struct NvtdeContext {
    AnsatzSpec ansatz; ///< covers the system only
    DensityMatrix rho;
    DensityMatrix sigma;
    std::size_t k = 1;
};

/// rho (x) |0><0| with the ancilla appended as the last qubit.
ComplexMatrix append_zero_ancilla(const ComplexMatrix& m);

/// tr[(|0><0| on `qubit`) m] for an operator on n qubits.
double proj0_expectation(const ComplexMatrix& m, int n_qubits, int qubit);
double expect_proj0_ancilla(const DensityMatrix& rho_ar, int ancilla_index);

/// Estimate of a probability p from `shots` Bernoulli trials.
double sample_probability(double p, std::uint64_t shots, Rng& rng);

/// Destructive swap test: outcome 0 with probability (1 + overlap) / 2,
/// estimator 2 f - 1.
double swap_test_estimate(double overlap, std::uint64_t shots, Rng& rng);

double overlap_hs(const DensityMatrix& a, const DensityMatrix& b, Shots shots = {}, Rng* rng = nullptr);
Complex overlap_pure(const StateVector& psi, const StateVector& phi);

/// L1 = O_rho - O_sigma.
double loss_vtde(std::span<const double> theta, const VtdeContext& ctx, Rng* rng = nullptr);

/// 2 sum_j c_j tr[|0><0|_R U (rho_j (x) |0><0|) U^dagger] - sum_j c_j.
double loss_trace_norm(std::span<const double> theta, const TraceNormContext& ctx, Rng* rng = nullptr);

/// <psi| (I_A (x) U_R(theta)) |phi>.
Complex vfe_amplitude(std::span<const double> theta, const VfeContext& ctx);
/// L2 = |<psi| (I_A (x) U_R(theta)) |phi>|.
double loss_vfe(std::span<const double> theta, const VfeContext& ctx, Rng* rng = nullptr);

/// U(theta)|0...0> on A R.
StateVector vqsl_state(std::span<const double> theta, const VqslContext& ctx);
/// chi = tr_R U(theta)|0><0|U(theta)^dagger.
ComplexMatrix vqsl_marginal(std::span<const double> theta, const VqslContext& ctx);
/// L3 = tr chi^2 - 2 tr rho chi.
double loss_vqsl(std::span<const double> theta, const VqslContext& ctx, Rng* rng = nullptr);

/// L4^k = sum_{j<k} <j| U (rho - sigma) U^dagger |j>.
double loss_nvtde(std::span<const double> theta, const NvtdeContext& ctx);

/// scale * tr[M U(theta) X U(theta)^dagger] + offset for a diagonal
/// observable M. Gradients come from the parameter-shift rule, evaluated with
/// cached forward states and backward-evolved observables so that each
/// shifted circuit costs one gate conjugation instead of a full replay.
class ConjugatedExpectation {
  public:
    ConjugatedExpectation(AnsatzSpec ansatz, ComplexMatrix input, std::vector<double> observable_diag,
                          double scale = 1.0, double offset = 0.0);

    [[nodiscard]] std::size_t n_params() const noexcept { return n_params_; }
    [[nodiscard]] double value(std::span<const double> theta) const;
    double value_and_gradient(std::span<const double> theta, std::span<double> grad) const;

  private:
    AnsatzSpec ansatz_;
    std::vector<GateSpec> gates_;
    ComplexMatrix input_;
    std::vector<double> observable_;
    double scale_;
    double offset_;
    std::size_t n_params_;
};

/// Indicator of ancilla (last qubit) = 0 on an n-qubit register.
std::vector<double> ancilla_zero_indicator(int n_qubits);

ConjugatedExpectation make_vtde_expectation(const VtdeContext& ctx);
ConjugatedExpectation make_trace_norm_expectation(const TraceNormContext& ctx);
ConjugatedExpectation make_nvtde_expectation(const NvtdeContext& ctx);

} // namespace qmetric
