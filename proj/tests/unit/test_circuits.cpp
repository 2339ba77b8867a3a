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

#include <doctest.h>

#include "common.hpp"

using namespace t;

TEST_CASE("param_count") {
    CHECK(param_count({AnsatzFamily::hardware_efficient, 5, 1}) == 10);
    CHECK(param_count({AnsatzFamily::purification_u3, 3, 6}) == 54);
    CHECK(param_count({AnsatzFamily::hardware_efficient, 4, 0}) == 0);
    CHECK(param_count({AnsatzFamily::purification_u3, 4, 0}) == 0);
}

TEST_CASE("circuit_unitary basics") {
    CHECK(max_abs_diff(circuit_unitary({AnsatzFamily::hardware_efficient, 1, 3}, ParamVector(6, 0.0)),
                       ComplexMatrix::identity(2)) < 1e-15);
    // zero rotations leave only the CNOT chain
    const ComplexMatrix u0 = circuit_unitary({AnsatzFamily::hardware_efficient, 3, 1}, ParamVector(6, 0.0));
    const ref::Mat chain = ref::mul(ref::cnot(1, 2, 3), ref::cnot(0, 1, 3));
    CHECK(ref::max_diff(to_ref(u0), chain) < 1e-15);

    const ComplexMatrix ry_pi = circuit_unitary({AnsatzFamily::hardware_efficient, 1, 1}, ParamVector{M_PI, 0.0});
    CHECK(max_abs_diff(ry_pi, ComplexMatrix(2, 2, {0, -1, 1, 0})) < 1e-15);
    CHECK_THROWS_AS(circuit_unitary({AnsatzFamily::hardware_efficient, 2, 1}, ParamVector(3, 0.0)), DimensionError);
}

TEST_CASE("hardware-efficient circuit matches an explicit Kronecker expansion") {
    Rng rng(1);
    for (int n = 1; n <= 4; ++n) {
        for (int depth = 1; depth <= 3; ++depth) {
            const AnsatzSpec a{AnsatzFamily::hardware_efficient, n, depth};
            const ParamVector th = random_params(param_count(a), rng);
            CHECK(ref::max_diff(to_ref(circuit_unitary(a, th)), ref::hardware_efficient(n, depth, th)) < 1e-12);
        }
    }
}

TEST_CASE("purification_u3 layer matches U3 gates and circular CNOTs") {
    Rng rng(2);
    const int n = 3;
    const AnsatzSpec a{AnsatzFamily::purification_u3, n, 1};
    const ParamVector th = random_params(param_count(a), rng);
    ref::Mat u = ref::eye(8);
    for (int q = 0; q < n; ++q) {
        const double theta = th[3 * q];
        const double phi = th[3 * q + 1];
        const double lambda = th[3 * q + 2];
        // U3 = Rz(phi) Ry(theta) Rz(lambda)
        const ref::Mat g = ref::mul(ref::rz(phi), ref::mul(ref::ry(theta), ref::rz(lambda)));
        u = ref::mul(ref::on_qubit(g, q, n), u);
    }
    for (int q = 0; q < n; ++q) {
        u = ref::mul(ref::cnot(q, (q + 1) % n, n), u);
    }
    CHECK(ref::max_diff(to_ref(circuit_unitary(a, th)), u) < 1e-12);

    // all-zero U3 angles give the identity gate
    CHECK(max_abs_diff(u3_matrix(0.0, 0.0, 0.0), ComplexMatrix::identity(2)) < 1e-15);
    const ComplexMatrix one = circuit_unitary({AnsatzFamily::purification_u3, 1, 2}, ParamVector(6, 0.0));
    CHECK(max_abs_diff(one, ComplexMatrix::identity(2)) < 1e-15);
}

TEST_CASE("property: random circuits are unitary") {
    Rng rng(1000);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const AnsatzSpec a{trial % 2 ? AnsatzFamily::purification_u3 : AnsatzFamily::hardware_efficient,
                           1 + trial % 4, trial % 5};
        worst = std::max(worst, unitarity_error(circuit_unitary(a, random_params(param_count(a), rng))));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("property: matrix and gate-by-gate application agree") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const AnsatzSpec a{trial % 2 ? AnsatzFamily::purification_u3 : AnsatzFamily::hardware_efficient,
                           1 + trial % 4, 1 + trial % 3};
        const ParamVector th = random_params(param_count(a), rng);
        const StateVector psi = random_pure(a.n_qubits, rng);
        std::vector<Complex> v(psi.amplitudes().begin(), psi.amplitudes().end());
        const auto gates = ansatz_gates(a);
        apply_gates(v, a.n_qubits, gates, th);
        const auto w = multiply(circuit_unitary(a, th), psi.amplitudes());
        double diff = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            diff = std::max(diff, std::abs(v[i] - w[i]));
        }
        CHECK(diff < 1e-10);

        ComplexMatrix rho = density_from_vector(psi).matrix();
        conjugate_gates(rho, a.n_qubits, gates, th);
        const ComplexMatrix u = circuit_unitary(a, th);
        CHECK(max_abs_diff(rho, u * density_from_vector(psi).matrix() * u.adjoint()) < 1e-10);
    }
}

TEST_CASE("apply_to_density") {
    Rng rng(4);
    const DensityMatrix rho = random_mixed(2, 3, rng);
    CHECK(max_abs_diff(apply_to_density(ComplexMatrix::identity(4), rho).matrix(), rho.matrix()) == 0.0);
    const ComplexMatrix x(2, 2, {0, 1, 1, 0});
    CHECK(max_abs_diff(apply_to_density(x, density_from_vector(basis_state(1, 0))).matrix(), diag({0, 1})) == 0.0);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix u = random_unitary(4, rng);
        const DensityMatrix out = apply_to_density(u, rho);
        CHECK(out.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
        const auto a = herm_eigenvalues(out.matrix());
        const auto b = herm_eigenvalues(rho.matrix());
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(std::abs(a[i] - b[i]) < 1e-10);
        }
    }
    CHECK_THROWS_AS(apply_to_density(ComplexMatrix(4, 4, std::vector<Complex>(16, 0.5)), rho), StructureError);
    CHECK_THROWS_AS(apply_to_density(ComplexMatrix::identity(2), rho), DimensionError);
}

TEST_CASE("apply_to_vector") {
    Rng rng(5);
    const StateVector psi = random_pure(3, rng);
    const auto same = apply_to_vector(ComplexMatrix::identity(8), psi);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(std::abs(same.amplitudes()[i] - psi.amplitudes()[i]) < 1e-15);
    }
    const auto moved = apply_to_vector(random_unitary(8, rng), psi);
    double norm = 0.0;
    for (auto z : moved.amplitudes()) {
        norm += std::norm(z);
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));

    // a unitary on R leaves the A marginal unchanged
    const DensityMatrix rho = random_mixed(2, 3, rng);
    const StateVector pur = purify_exact(rho, 2);
    const std::vector<int> r_qubits{2, 3};
    const ComplexMatrix on_r = embed_on_subsystem(random_unitary(4, rng), 4, r_qubits);
    CHECK(max_abs_diff(reduced_density(apply_to_vector(on_r, pur), 2).matrix(), rho.matrix()) < 1e-10);
}

TEST_CASE("embed_on_subsystem") {
    const std::vector<int> q0{0};
    const std::vector<int> q1{1};
    const std::vector<int> both{0, 1};
    const ComplexMatrix x(2, 2, {0, 1, 1, 0});
    CHECK(max_abs_diff(embed_on_subsystem(ComplexMatrix::identity(2), 2, q0), ComplexMatrix::identity(4)) == 0.0);
    CHECK(max_abs_diff(embed_on_subsystem(x, 2, q1), kron(ComplexMatrix::identity(2), x)) == 0.0);
    Rng rng(6);
    const ComplexMatrix u = random_unitary(4, rng);
    CHECK(max_abs_diff(embed_on_subsystem(u, 2, both), u) < 1e-15);
    const std::vector<int> dup{1, 1};
    const std::vector<int> out_of_range{2};
    CHECK_THROWS_AS(embed_on_subsystem(u, 2, dup), RangeError);
    CHECK_THROWS_AS(embed_on_subsystem(x, 2, out_of_range), RangeError);
}

TEST_CASE("fused conjugated trace equals explicit conjugation") {
    Rng rng(7);
    const int n = 3;
    for (int target = 0; target < n; ++target) {
        const ComplexMatrix m = random_hermitian(8, rng);
        const ComplexMatrix x = random_hermitian(8, rng);
        const ComplexMatrix g = random_unitary(2, rng);
        const std::array<Complex, 4> u{g(0, 0), g(0, 1), g(1, 0), g(1, 1)};
        const std::vector<int> tq{target};
        const ComplexMatrix full = embed_on_subsystem(g, n, tq);
        CHECK(conjugated_trace(m, x, n, target, u) ==
              doctest::Approx(trace_product_real(m, full * x * full.adjoint())).epsilon(1e-12));
    }
}

TEST_CASE("ansatz JSON") {
    const AnsatzSpec a{AnsatzFamily::purification_u3, 3, 6};
    const AnsatzSpec b = ansatz_from_json(to_json(a));
    CHECK(b.family == a.family);
    CHECK(b.n_qubits == 3);
    CHECK(b.depth == 6);
    CHECK_THROWS_AS(ansatz_family_from_string("ring"), RangeError);
}
