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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmetric/linalg.hpp"
#include "qmetric/rng.hpp"
#include "qmetric/states.hpp"

namespace qmetric {

enum class AnsatzFamily {
    hardware_efficient, ///< per layer: Ry then Rz on every qubit, CNOT chain i -> i+1
    purification_u3,    ///< per layer: U3 on every qubit, circular CNOTs ending (n-1) -> 0
};

struct AnsatzSpec {
    AnsatzFamily family = AnsatzFamily::hardware_efficient;
    int n_qubits = 1;
    int depth = 1;
};

using ParamVector = std::vector<double>;

enum class GateKind { Ry, Rz, U3, CNOT, CZ };

/// One gate of a lowered circuit. Rotations are e^{-i angle P/2}; when
/// `param` is non-negative the angle is read from the parameter vector.
/// U3 only appears in user-built lists; ansatz lowering expands it into
/// Rz(lambda) Ry(theta) Rz(phi).
struct GateSpec {
    GateKind kind = GateKind::Ry;
    int target = 0;
    int control = -1;
    int param = -1;
    std::array<double, 3> angles{0.0, 0.0, 0.0};
};

std::size_t param_count(const AnsatzSpec& a);

/// Elementary gate sequence (in application order) for an ansatz. Every
/// parameter index appears in exactly one Ry or Rz gate.
std::vector<GateSpec> ansatz_gates(const AnsatzSpec& a);

/// Renumbers gate qubits by `offset` (used to place an ansatz on the
/// trailing ancilla register).
std::vector<GateSpec> offset_qubits(std::vector<GateSpec> gates, int offset);

ComplexMatrix ry_matrix(double theta);
ComplexMatrix rz_matrix(double theta);
/// Rz(phi) Ry(theta) Rz(lambda).
ComplexMatrix u3_matrix(double theta, double phi, double lambda);

/// Angles of a rotation gate given the parameter vector (fixed angles
/// otherwise).
double gate_angle(const GateSpec& g, std::span<const double> theta, std::size_t which = 0);

/// 2x2 matrix of a single-qubit gate, row-major.
std::array<Complex, 4> single_qubit_matrix(const GateSpec& g, std::span<const double> theta);

/// Re tr[M (u X u^dagger)] with u on `target`, for Hermitian M, without
/// forming the conjugated operator.
double conjugated_trace(const ComplexMatrix& m, const ComplexMatrix& x, int n_qubits, int target,
                        const std::array<Complex, 4>& u);

/// In-place kernels. Qubit 0 is the most significant bit of the basis index.
void apply_single_qubit(std::span<Complex> psi, int n_qubits, int target, const std::array<Complex, 4>& u);
void apply_gate(std::span<Complex> psi, int n_qubits, const GateSpec& g, std::span<const double> theta);
void apply_gates(std::span<Complex> psi, int n_qubits, std::span<const GateSpec> gates,
                 std::span<const double> theta);

/// rho <- G rho G^dagger for a row-major 2^n x 2^n matrix.
void conjugate_gate(ComplexMatrix& rho, int n_qubits, const GateSpec& g, std::span<const double> theta);
void conjugate_gates(ComplexMatrix& rho, int n_qubits, std::span<const GateSpec> gates,
                     std::span<const double> theta);
/// rho <- G^dagger rho G.
void conjugate_gate_adjoint(ComplexMatrix& rho, int n_qubits, const GateSpec& g,
                            std::span<const double> theta);

/// Multiplies `u` from the left by the gate (u <- G u).
void left_multiply_gate(ComplexMatrix& u, int n_qubits, const GateSpec& g, std::span<const double> theta);

ComplexMatrix circuit_unitary(const AnsatzSpec& a, std::span<const double> theta);
ComplexMatrix gates_unitary(int n_qubits, std::span<const GateSpec> gates, std::span<const double> theta);

/// U rho U^dagger; `u` must be unitary within 1e-8.
DensityMatrix apply_to_density(const ComplexMatrix& u, const DensityMatrix& rho);

/// U |psi>, renormalized.
StateVector apply_to_vector(const ComplexMatrix& u, const StateVector& psi);

/// Full-register unitary acting as `u` on `targets` (the first target is the
/// most significant qubit of `u`) and as identity elsewhere.
ComplexMatrix embed_on_subsystem(const ComplexMatrix& u, int total_qubits, std::span<const int> targets);

/// Independent uniform angles on [0, 2 pi).
ParamVector random_params(std::size_t count, Rng& rng);

std::string to_string(AnsatzFamily f);
AnsatzFamily ansatz_family_from_string(const std::string& s);
nlohmann::json to_json(const AnsatzSpec& a);
AnsatzSpec ansatz_from_json(const nlohmann::json& j);

} // namespace qmetric
