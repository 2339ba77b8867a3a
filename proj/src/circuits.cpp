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

#include "qmetric/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "qmetric/error.hpp"

namespace qmetric {

namespace {

using Mat2 = std::array<Complex, 4>; // row-major [u00, u01, u10, u11]

Mat2 ry2(double t) {
    const double c = std::cos(0.5 * t);
    const double s = std::sin(0.5 * t);
    return {Complex{c}, Complex{-s}, Complex{s}, Complex{c}};
}

Mat2 rz2(double t) {
    return {std::polar(1.0, -0.5 * t), Complex{0.0}, Complex{0.0}, std::polar(1.0, 0.5 * t)};
}

Mat2 mul2(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 adjoint2(const Mat2& u) {
    return {std::conj(u[0]), std::conj(u[2]), std::conj(u[1]), std::conj(u[3])};
}

Mat2 u3_2(double theta, double phi, double lambda) {
    return mul2(rz2(phi), mul2(ry2(theta), rz2(lambda)));
}

std::size_t bit_of(int n_qubits, int qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

void check_qubit(int n_qubits, int q) {
    if (q < 0 || q >= n_qubits) {
        throw RangeError("gate qubit " + std::to_string(q) + " outside register of " +
                         std::to_string(n_qubits));
    }
}

void check_gate(int n_qubits, const GateSpec& g) {
    check_qubit(n_qubits, g.target);
    if (g.kind == GateKind::CNOT || g.kind == GateKind::CZ) {
        check_qubit(n_qubits, g.control);
        if (g.control == g.target) {
            throw RangeError("two-qubit gate with identical control and target");
        }
    }
}

} // namespace

Mat2 single_qubit_matrix(const GateSpec& g, std::span<const double> theta) {
    switch (g.kind) {
    case GateKind::Ry:
        return ry2(gate_angle(g, theta));
    case GateKind::Rz:
        return rz2(gate_angle(g, theta));
    case GateKind::U3:
        return u3_2(gate_angle(g, theta, 0), gate_angle(g, theta, 1), gate_angle(g, theta, 2));
    default:
        throw RangeError("not a single-qubit gate");
    }
}

namespace {

ComplexMatrix to_matrix(const Mat2& u) { return ComplexMatrix(2, 2, {u[0], u[1], u[2], u[3]}); }

// Row pass of u * rho.
void rows_single(ComplexMatrix& m, std::size_t bit, const Mat2& u) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    auto data = m.data();
    for (std::size_t r0 = 0; r0 < rows; ++r0) {
        if (r0 & bit) {
            continue;
        }
        Complex* a = &data[r0 * cols];
        Complex* b = &data[(r0 | bit) * cols];
        for (std::size_t c = 0; c < cols; ++c) {
            const Complex x = a[c];
            const Complex y = b[c];
            a[c] = u[0] * x + u[1] * y;
            b[c] = u[2] * x + u[3] * y;
        }
    }
}

// Column pass of rho * u^dagger.
void cols_single_adjoint(ComplexMatrix& m, std::size_t bit, const Mat2& u) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    auto data = m.data();
    const Complex c00 = std::conj(u[0]);
    const Complex c01 = std::conj(u[1]);
    const Complex c10 = std::conj(u[2]);
    const Complex c11 = std::conj(u[3]);
    for (std::size_t r = 0; r < rows; ++r) {
        Complex* row = &data[r * cols];
        for (std::size_t c0 = 0; c0 < cols; ++c0) {
            if (c0 & bit) {
                continue;
            }
            const Complex x = row[c0];
            const Complex y = row[c0 | bit];
            row[c0] = x * c00 + y * c01;
            row[c0 | bit] = x * c10 + y * c11;
        }
    }
}

void conjugate_rz(ComplexMatrix& m, std::size_t bit, double angle) {
    const Complex down = std::polar(1.0, -angle); // row bit 0, col bit 1
    const Complex up = std::conj(down);           // row bit 1, col bit 0
    const std::size_t n = m.rows();
    auto data = m.data();
    for (std::size_t r = 0; r < n; ++r) {
        const bool rb = (r & bit) != 0;
        Complex* row = &data[r * n];
        const Complex f = rb ? up : down;
        for (std::size_t c = 0; c < n; ++c) {
            if (((c & bit) != 0) != rb) {
                row[c] *= f;
            }
        }
    }
}

void conjugate_cnot(ComplexMatrix& m, std::size_t cbit, std::size_t tbit) {
    const std::size_t n = m.rows();
    auto data = m.data();
    for (std::size_t r = 0; r < n; ++r) {
        if ((r & cbit) && !(r & tbit)) {
            std::swap_ranges(&data[r * n], &data[r * n] + n, &data[(r | tbit) * n]);
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        Complex* row = &data[r * n];
        for (std::size_t c = 0; c < n; ++c) {
            if ((c & cbit) && !(c & tbit)) {
                std::swap(row[c], row[c | tbit]);
            }
        }
    }
}

void conjugate_cz(ComplexMatrix& m, std::size_t cbit, std::size_t tbit) {
    const std::size_t n = m.rows();
    const std::size_t both = cbit | tbit;
    auto data = m.data();
    for (std::size_t r = 0; r < n; ++r) {
        const bool rs = (r & both) == both;
        for (std::size_t c = 0; c < n; ++c) {
            const bool cs = (c & both) == both;
            if (rs != cs) {
                data[r * n + c] = -data[r * n + c];
            }
        }
    }
}

void conjugate_impl(ComplexMatrix& rho, int n_qubits, const GateSpec& g,
                    std::span<const double> theta, bool adjoint) {
    check_gate(n_qubits, g);
    const std::size_t tbit = bit_of(n_qubits, g.target);
    switch (g.kind) {
    case GateKind::Rz: {
        const double angle = gate_angle(g, theta);
        conjugate_rz(rho, tbit, adjoint ? -angle : angle);
        return;
    }
    case GateKind::Ry:
    case GateKind::U3: {
        Mat2 u = single_qubit_matrix(g, theta);
        if (adjoint) {
            u = adjoint2(u);
        }
        rows_single(rho, tbit, u);
        cols_single_adjoint(rho, tbit, u);
        return;
    }
    case GateKind::CNOT:
        conjugate_cnot(rho, bit_of(n_qubits, g.control), tbit);
        return;
    case GateKind::CZ:
        conjugate_cz(rho, bit_of(n_qubits, g.control), tbit);
        return;
    }
}

} // namespace

std::size_t param_count(const AnsatzSpec& a) {
    const auto per_gate = a.family == AnsatzFamily::hardware_efficient ? 2u : 3u;
    return per_gate * static_cast<std::size_t>(a.n_qubits) * static_cast<std::size_t>(a.depth);
}

std::vector<GateSpec> ansatz_gates(const AnsatzSpec& a) {
    if (a.n_qubits < 1) {
        throw RangeError("ansatz needs at least one qubit");
    }
    if (a.depth < 0) {
        throw RangeError("ansatz depth must be non-negative");
    }
    const int n = a.n_qubits;
    std::vector<GateSpec> gates;
    int next = 0;
    for (int layer = 0; layer < a.depth; ++layer) {
        if (a.family == AnsatzFamily::hardware_efficient) {
            for (int q = 0; q < n; ++q) {
                gates.push_back({GateKind::Ry, q, -1, next++, {}});
                gates.push_back({GateKind::Rz, q, -1, next++, {}});
            }
            for (int q = 0; q + 1 < n; ++q) {
                gates.push_back({GateKind::CNOT, q + 1, q, -1, {}});
            }
        } else {
            for (int q = 0; q < n; ++q) {
                // U3(theta, phi, lambda) = Rz(phi) Ry(theta) Rz(lambda): lambda acts first.
                const int base = next;
                next += 3;
                gates.push_back({GateKind::Rz, q, -1, base + 2, {}});
                gates.push_back({GateKind::Ry, q, -1, base + 0, {}});
                gates.push_back({GateKind::Rz, q, -1, base + 1, {}});
            }
            if (n > 1) {
                for (int q = 0; q < n; ++q) {
                    gates.push_back({GateKind::CNOT, (q + 1) % n, q, -1, {}});
                }
            }
        }
    }
    return gates;
}

std::vector<GateSpec> offset_qubits(std::vector<GateSpec> gates, int offset) {
    for (auto& g : gates) {
        g.target += offset;
        if (g.control >= 0) {
            g.control += offset;
        }
    }
    return gates;
}

ComplexMatrix ry_matrix(double theta) { return to_matrix(ry2(theta)); }
ComplexMatrix rz_matrix(double theta) { return to_matrix(rz2(theta)); }
ComplexMatrix u3_matrix(double theta, double phi, double lambda) {
    return to_matrix(u3_2(theta, phi, lambda));
}

double gate_angle(const GateSpec& g, std::span<const double> theta, std::size_t which) {
    if (g.param < 0) {
        return g.angles[which];
    }
    const auto idx = static_cast<std::size_t>(g.param) + which;
    if (idx >= theta.size()) {
        throw RangeError("gate parameter index " + std::to_string(idx) + " beyond parameter vector");
    }
    return theta[idx];
}

void apply_single_qubit(std::span<Complex> psi, int n_qubits, int target, const Mat2& u) {
    check_qubit(n_qubits, target);
    const std::size_t bit = bit_of(n_qubits, target);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (i & bit) {
            continue;
        }
        const Complex x = psi[i];
        const Complex y = psi[i | bit];
        psi[i] = u[0] * x + u[1] * y;
        psi[i | bit] = u[2] * x + u[3] * y;
    }
}

void apply_gate(std::span<Complex> psi, int n_qubits, const GateSpec& g, std::span<const double> theta) {
    check_gate(n_qubits, g);
    switch (g.kind) {
    case GateKind::Ry:
    case GateKind::Rz:
    case GateKind::U3:
        apply_single_qubit(psi, n_qubits, g.target, single_qubit_matrix(g, theta));
        return;
    case GateKind::CNOT: {
        const std::size_t cbit = bit_of(n_qubits, g.control);
        const std::size_t tbit = bit_of(n_qubits, g.target);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if ((i & cbit) && !(i & tbit)) {
                std::swap(psi[i], psi[i | tbit]);
            }
        }
        return;
    }
    case GateKind::CZ: {
        const std::size_t both = bit_of(n_qubits, g.control) | bit_of(n_qubits, g.target);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if ((i & both) == both) {
                psi[i] = -psi[i];
            }
        }
        return;
    }
    }
}

void apply_gates(std::span<Complex> psi, int n_qubits, std::span<const GateSpec> gates,
                 std::span<const double> theta) {
    if (psi.size() != (std::size_t{1} << n_qubits)) {
        throw DimensionError("state size does not match register");
    }
    for (const auto& g : gates) {
        apply_gate(psi, n_qubits, g, theta);
    }
}

double conjugated_trace(const ComplexMatrix& m, const ComplexMatrix& x, int n_qubits, int target, const Mat2& u) {
    check_qubit(n_qubits, target);
    const std::size_t n = x.rows();
    if (n != (std::size_t{1} << n_qubits) || m.rows() != n || !m.is_square() || !x.is_square()) {
        throw DimensionError("operator size does not match register");
    }
    const std::size_t bit = bit_of(n_qubits, target);
    const Complex v0 = std::conj(u[0]);
    const Complex v1 = std::conj(u[1]);
    const Complex v2 = std::conj(u[2]);
    const Complex v3 = std::conj(u[3]);
    const auto xd = x.data();
    const auto md = m.data();
    double acc = 0.0;
    for (std::size_t r0 = 0; r0 < n; ++r0) {
        if (r0 & bit) {
            continue;
        }
        const std::size_t r1 = r0 | bit;
        const Complex* x0 = &xd[r0 * n];
        const Complex* x1 = &xd[r1 * n];
        const Complex* m0 = &md[r0 * n];
        const Complex* m1 = &md[r1 * n];
        for (std::size_t c0 = 0; c0 < n; ++c0) {
            if (c0 & bit) {
                continue;
            }
            const std::size_t c1 = c0 | bit;
            const Complex t00 = u[0] * x0[c0] + u[1] * x1[c0];
            const Complex t01 = u[0] * x0[c1] + u[1] * x1[c1];
            const Complex t10 = u[2] * x0[c0] + u[3] * x1[c0];
            const Complex t11 = u[2] * x0[c1] + u[3] * x1[c1];
            const Complex y00 = t00 * v0 + t01 * v1;
            const Complex y01 = t00 * v2 + t01 * v3;
            const Complex y10 = t10 * v0 + t11 * v1;
            const Complex y11 = t10 * v2 + t11 * v3;
            acc += (std::conj(m0[c0]) * y00 + std::conj(m0[c1]) * y01 + std::conj(m1[c0]) * y10 +
                    std::conj(m1[c1]) * y11)
                       .real();
        }
    }
    return acc;
}

void conjugate_gate(ComplexMatrix& rho, int n_qubits, const GateSpec& g, std::span<const double> theta) {
    conjugate_impl(rho, n_qubits, g, theta, false);
}

void conjugate_gate_adjoint(ComplexMatrix& rho, int n_qubits, const GateSpec& g,
                            std::span<const double> theta) {
    conjugate_impl(rho, n_qubits, g, theta, true);
}

void conjugate_gates(ComplexMatrix& rho, int n_qubits, std::span<const GateSpec> gates,
                     std::span<const double> theta) {
    if (rho.rows() != (std::size_t{1} << n_qubits) || !rho.is_square()) {
        throw DimensionError("operator size does not match register");
    }
    for (const auto& g : gates) {
        conjugate_gate(rho, n_qubits, g, theta);
    }
}

void left_multiply_gate(ComplexMatrix& u, int n_qubits, const GateSpec& g, std::span<const double> theta) {
    check_gate(n_qubits, g);
    const std::size_t tbit = bit_of(n_qubits, g.target);
    const std::size_t cols = u.cols();
    auto data = u.data();
    switch (g.kind) {
    case GateKind::Ry:
    case GateKind::Rz:
    case GateKind::U3:
        rows_single(u, tbit, single_qubit_matrix(g, theta));
        return;
    case GateKind::CNOT: {
        const std::size_t cbit = bit_of(n_qubits, g.control);
        for (std::size_t r = 0; r < u.rows(); ++r) {
            if ((r & cbit) && !(r & tbit)) {
                std::swap_ranges(&data[r * cols], &data[r * cols] + cols, &data[(r | tbit) * cols]);
            }
        }
        return;
    }
    case GateKind::CZ: {
        const std::size_t both = bit_of(n_qubits, g.control) | tbit;
        for (std::size_t r = 0; r < u.rows(); ++r) {
            if ((r & both) == both) {
                for (std::size_t c = 0; c < cols; ++c) {
                    data[r * cols + c] = -data[r * cols + c];
                }
            }
        }
        return;
    }
    }
}

ComplexMatrix gates_unitary(int n_qubits, std::span<const GateSpec> gates, std::span<const double> theta) {
    ComplexMatrix u = ComplexMatrix::identity(std::size_t{1} << n_qubits);
    for (const auto& g : gates) {
        left_multiply_gate(u, n_qubits, g, theta);
    }
    return u;
}

ComplexMatrix circuit_unitary(const AnsatzSpec& a, std::span<const double> theta) {
    if (theta.size() != param_count(a)) {
        throw DimensionError("circuit_unitary: expected " + std::to_string(param_count(a)) +
                             " parameters, got " + std::to_string(theta.size()));
    }
    const auto gates = ansatz_gates(a);
    return gates_unitary(a.n_qubits, gates, theta);
}

DensityMatrix apply_to_density(const ComplexMatrix& u, const DensityMatrix& rho) {
    if (u.rows() != rho.dim() || !u.is_square()) {
        throw DimensionError("apply_to_density: unitary and state dimensions differ");
    }
    if (unitarity_error(u) > 1e-8) {
        throw StructureError("apply_to_density: operator is not unitary");
    }
    return make_density_unchecked(u * rho.matrix() * u.adjoint());
}

StateVector apply_to_vector(const ComplexMatrix& u, const StateVector& psi) {
    if (u.rows() != psi.dim() || !u.is_square()) {
        throw DimensionError("apply_to_vector: unitary and state dimensions differ");
    }
    if (unitarity_error(u) > 1e-8) {
        throw StructureError("apply_to_vector: operator is not unitary");
    }
    auto out = multiply(u, psi.amplitudes());
    double norm2 = 0.0;
    for (const auto& z : out) {
        norm2 += std::norm(z);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& z : out) {
        z *= inv;
    }
    return StateVector::from_amplitudes(std::move(out));
}

ComplexMatrix embed_on_subsystem(const ComplexMatrix& u, int total_qubits, std::span<const int> targets) {
    const std::size_t k = targets.size();
    if (u.rows() != (std::size_t{1} << k) || !u.is_square()) {
        throw DimensionError("embed_on_subsystem: operator dimension does not match target count");
    }
    std::vector<bool> used(static_cast<std::size_t>(std::max(total_qubits, 0)), false);
    for (int t : targets) {
        if (t < 0 || t >= total_qubits) {
            throw RangeError("embed_on_subsystem: target qubit out of range");
        }
        if (used[static_cast<std::size_t>(t)]) {
            throw RangeError("embed_on_subsystem: overlapping target qubits");
        }
        used[static_cast<std::size_t>(t)] = true;
    }
    const std::size_t dim = std::size_t{1} << total_qubits;
    std::size_t target_mask = 0;
    for (int t : targets) {
        target_mask |= bit_of(total_qubits, t);
    }
    auto sub_index = [&](std::size_t full) {
        std::size_t s = 0;
        for (int t : targets) {
            s = (s << 1) | ((full & bit_of(total_qubits, t)) ? 1u : 0u);
        }
        return s;
    };
    ComplexMatrix out(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            if ((r & ~target_mask) == (c & ~target_mask)) {
                out(r, c) = u(sub_index(r), sub_index(c));
            }
        }
    }
    return out;
}

ParamVector random_params(std::size_t count, Rng& rng) {
    ParamVector theta(count);
    for (auto& t : theta) {
        t = 2.0 * std::numbers::pi * (static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53);
    }
    return theta;
}

std::string to_string(AnsatzFamily f) {
    return f == AnsatzFamily::hardware_efficient ? "hardware_efficient" : "purification_u3";
}

AnsatzFamily ansatz_family_from_string(const std::string& s) {
    if (s == "hardware_efficient") {
        return AnsatzFamily::hardware_efficient;
    }
    if (s == "purification_u3") {
        return AnsatzFamily::purification_u3;
    }
    throw RangeError("unknown ansatz family '" + s + "'");
}

nlohmann::json to_json(const AnsatzSpec& a) {
    return {{"family", to_string(a.family)}, {"n_qubits", a.n_qubits}, {"depth", a.depth}};
}

AnsatzSpec ansatz_from_json(const nlohmann::json& j) {
    AnsatzSpec a;
    a.family = ansatz_family_from_string(j.at("family").get<std::string>());
    a.n_qubits = j.at("n_qubits").get<int>();
    a.depth = j.at("depth").get<int>();
    if (a.n_qubits < 1 || a.depth < 0) {
        throw RangeError("ansatz JSON: n_qubits >= 1 and depth >= 0 required");
    }
    return a;
}

} // namespace qmetric
