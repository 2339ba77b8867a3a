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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmetric/linalg.hpp"
#include "qmetric/rng.hpp"

namespace qmetric {

inline constexpr double kStateTol = 1e-10;
/// Eigenvalues at or below this count as zero when a rank is needed.
inline constexpr double kRankTol = 1e-12;

/// Trace-one positive semidefinite operator on n qubits.
class DensityMatrix {
  public:
    /// Validates Hermiticity, unit trace and positivity (all within 1e-10)
    /// and stores the symmetrized matrix.
    static DensityMatrix from_matrix(const ComplexMatrix& m);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return mat_.rows(); }
    [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return mat_; }

    [[nodiscard]] double purity() const { return trace_product_real(mat_, mat_); }

  private:
    DensityMatrix(int n_qubits, ComplexMatrix m) : n_qubits_(n_qubits), mat_(std::move(m)) {}

    friend DensityMatrix make_density_unchecked(ComplexMatrix m);

    int n_qubits_ = 0;
    ComplexMatrix mat_;
};

/// Wraps a matrix produced by a trace- and positivity-preserving construction.
/// Only Hermiticity and shape are checked.
DensityMatrix make_density_unchecked(ComplexMatrix m);

/// Unit-norm pure state on n qubits.
class StateVector {
  public:
    static StateVector from_amplitudes(std::vector<Complex> amp);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return amp_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amp_; }

  private:
    StateVector(int n_qubits, std::vector<Complex> amp)
        : n_qubits_(n_qubits), amp_(std::move(amp)) {}

    int n_qubits_ = 0;
    std::vector<Complex> amp_;
};

enum class ChannelKind { depolarizing, dephasing };

struct ChannelSpec {
    ChannelKind kind = ChannelKind::depolarizing;
    double p = 0.0;
};

/// Number of qubits for a power-of-two dimension; throws otherwise.
int qubits_for_dim(std::size_t dim);

DensityMatrix density_from_vector(const StateVector& v);

/// (|0...0> + |1...1>) / sqrt(2).
StateVector ghz(int n);

/// Computational basis state |index> on n qubits.
StateVector basis_state(int n, std::size_t index);

/// |+> on one qubit.
StateVector plus_state();

DensityMatrix maximally_mixed(int n);

/// Depolarizing: p I/2^n + (1-p) rho on all qubits.
/// Dephasing: p Z rho Z + (1-p) rho, single-qubit inputs only.
DensityMatrix apply_channel(const DensityMatrix& rho, const ChannelSpec& ch);

/// Haar-random pure state.
StateVector random_pure(int n, Rng& rng);

/// Haar-random d x k isometry (orthonormal columns), k <= d.
ComplexMatrix random_isometry(std::size_t d, std::size_t k, Rng& rng);

/// Haar-random unitary of dimension d.
ComplexMatrix random_unitary(std::size_t d, Rng& rng);

/// Density matrix of exact rank k: random isometry columns weighted by
/// normalized exponential variates.
DensityMatrix random_mixed(int n, std::size_t k, Rng& rng);

/// Number of eigenvalues above kRankTol.
std::size_t numerical_rank(const ComplexMatrix& h);

/// sum_j sqrt(lambda_j) |psi_j>_A |j>_R with the ancilla R as the trailing
/// n_R qubits.
StateVector purify_exact(const DensityMatrix& rho, int n_r);

/// Reduced state on the first n_a qubits of a pure state.
DensityMatrix reduced_density(const StateVector& psi, int n_a);

/// Row-major {n_qubits, entries: [[re, im], ...]}.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
/// Parses the matrix format without requiring the density-matrix invariants.
ComplexMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DensityMatrix& rho);
/// Parses and validates; invariant failures raise InvariantViolation.
DensityMatrix density_from_json(const nlohmann::json& j);

} // namespace qmetric
