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

namespace {

const DensityMatrix& plus() {
    static const DensityMatrix p = density_from_vector(plus_state());
    return p;
}

DensityMatrix deph(double p) { return apply_channel(plus(), {ChannelKind::dephasing, p}); }

} // namespace

TEST_CASE("vtde") {
    SUBCASE("identical states") {
        const auto r = vtde(plus(), plus());
        CHECK(r.estimate <= 1e-6);
        CHECK(r.one_sided());
    }
    SUBCASE("plus versus dephased plus") {
        VtdeOptions o;
        o.opt.seed = 42;
        const auto r = vtde(plus(), deph(0.7), o);
        CHECK(std::abs(r.estimate - 0.7) <= 0.005 * 0.7);
        CHECK(*r.oracle == doctest::Approx(0.7));
        CHECK(r.one_sided());
        CHECK(r.iterations() == 360);
        CHECK(r.traces.size() == 1);
    }
    SUBCASE("GHZ versus depolarized GHZ, deep ansatz") {
        const DensityMatrix g = density_from_vector(ghz(4));
        VtdeOptions o;
        o.depth = 60;
        o.opt.seed = 7;
        const auto r = vtde(g, apply_channel(g, {ChannelKind::depolarizing, 0.5}), o);
        CHECK(r.estimate >= 0.99 * 15.0 / 32.0);
        CHECK(r.one_sided());
    }
    SUBCASE("mismatched registers") {
        CHECK_THROWS_AS(vtde(plus(), maximally_mixed(2)), DimensionError);
    }
    SUBCASE("shot mode stays near the exact value") {
        VtdeOptions o;
        o.opt.seed = 3;
        o.shots = 20000;
        const auto r = vtde(plus(), deph(0.7), o);
        CHECK(std::abs(r.estimate - 0.7) < 0.03);
        VtdeOptions again = o;
        CHECK(vtde(plus(), deph(0.7), again).estimate == r.estimate);
    }
}

TEST_CASE("trace_norm_estimate") {
    Rng rng(1);
    const DensityMatrix r = random_mixed(2, 2, rng);
    CHECK(std::abs(trace_norm_estimate(HermitianDecomposition({{1.0, r}})).estimate - 1.0) < 1e-3);

    const DensityMatrix z0 = density_from_vector(basis_state(1, 0));
    const DensityMatrix z1 = density_from_vector(basis_state(1, 1));
    const auto d12 = trace_norm_estimate(HermitianDecomposition({{1.0, z0}, {-2.0, z1}}));
    CHECK(std::abs(d12.estimate - 3.0) < 1e-2);
    CHECK(d12.one_sided());

    for (int trial = 0; trial < 3; ++trial) {
        const DensityMatrix a = random_mixed(2, 1 + trial, rng);
        const DensityMatrix b = random_mixed(2, 4, rng);
        VtdeOptions o;
        o.depth = 8;
        o.opt.seed = 100 + trial;
        const auto tn = trace_norm_estimate(HermitianDecomposition({{0.5, a}, {-0.5, b}}), o);
        const auto td = vtde(a, b, o);
        CHECK(std::abs(tn.estimate - td.estimate) < 1e-3);
        CHECK(tn.one_sided());
    }
}

TEST_CASE("trace_norm_two_sided") {
    Rng rng(2);
    SUBCASE("PSD operator") {
        const ComplexMatrix h = random_psd(4, rng);
        const auto r = trace_norm_two_sided(h);
        CHECK(r.traces.size() == 2);
        CHECK(std::abs(r.traces[1].best_loss) < 1e-3);
        CHECK(std::abs(r.estimate - h.trace().real()) < 1e-2 * h.trace().real());
        CHECK(r.one_sided());
    }
    SUBCASE("diag(3,1,-2,-4)") {
        const auto r = trace_norm_two_sided(diag({3, 1, -2, -4}));
        CHECK(std::abs(r.estimate - 10.0) < 1e-2);
        CHECK(r.one_sided());
    }
    SUBCASE("agrees with the decomposition route") {
        const DensityMatrix a = random_mixed(1, 2, rng);
        const DensityMatrix b = random_mixed(1, 1, rng);
        const HermitianDecomposition d({{1.5, a}, {-0.7, b}});
        VtdeOptions o;
        o.opt.seed = 11;
        const auto two = trace_norm_two_sided(d.reconstruct(), o);
        const auto one = trace_norm_estimate(d, o);
        CHECK(std::abs(two.estimate - one.estimate) < 2e-3);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(trace_norm_two_sided(ComplexMatrix(2, 2, {0, 1, 0, 0})), StructureError);
        VtdeOptions o;
        o.shots = 100;
        CHECK_THROWS_AS(trace_norm_two_sided(diag({1, -1}), o), RangeError);
    }
}

TEST_CASE("vqsl") {
    Rng rng(3);
    SUBCASE("pure target") {
        const auto r = vqsl(density_from_vector(random_pure(1, rng)));
        CHECK(r.achieved_fidelity >= 0.999);
        CHECK(r.fidelity_bound == 1.0);
    }
    SUBCASE("rank-4 two-qubit target with one ancilla") {
        const DensityMatrix rho = random_mixed(2, 4, rng);
        const auto ev = herm_eigenvalues(rho.matrix());
        const auto r = vqsl(rho);
        CHECK(r.achieved_fidelity <= std::sqrt(ev[0] + ev[1]) + 0.01);
        CHECK(r.achieved_fidelity >= std::sqrt(0.5) - 0.01);
        CHECK(r.fidelity_bound == doctest::Approx(std::sqrt(ev[0] + ev[1])));
        CHECK(r.achieved_fidelity ==
              doctest::Approx(exact_fidelity(rho, reduced_density(r.purification, 2))).epsilon(1e-10));
    }
    SUBCASE("needs an ancilla") {
        VqslOptions o;
        o.n_r = 0;
        CHECK_THROWS_AS(vqsl(maximally_mixed(1), o), RangeError);
    }
}

TEST_CASE("property: vqsl respects the purification ceiling") {
    Rng rng(4);
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 2;
        const std::size_t rank = 1 + static_cast<std::size_t>(trial / 2) % (std::size_t{1} << n);
        VqslOptions o;
        o.n_r = 1 + (trial / 3) % 2;
        o.depth = 3;
        o.opt.iterations = 30;
        o.opt.restarts = 1;
        o.opt.seed = trial;
        const DensityMatrix rho = random_mixed(n, rank, rng);
        const auto r = vqsl(rho, o);
        violations += r.achieved_fidelity > r.fidelity_bound + 0.01;
        CHECK(r.fidelity_bound ==
              doctest::Approx(purification_fidelity_bound(rho, std::size_t{1} << o.n_r)));
    }
    CHECK(violations == 0);
}

TEST_CASE("vfe") {
    Rng rng(5);
    SUBCASE("identical pure states") {
        const DensityMatrix p = density_from_vector(random_pure(1, rng));
        const auto r = vfe(p, p);
        CHECK(std::abs(r.estimate - 1.0) < 1e-4);
    }
    SUBCASE("dephased plus pair") {
        VfeOptions o;
        o.n_r = 1;
        o.opt_purify.seed = 42;
        o.opt_fid.seed = derive_seed(42, 2);
        const auto r = vfe(deph(0.2), deph(0.9), o);
        CHECK(std::abs(r.estimate - 0.70710) <= 0.001 * 0.70710);
        CHECK(r.traces.size() == 3);
        CHECK(r.one_sided());
    }
    SUBCASE("exact purifications are one-sided") {
        for (int trial = 0; trial < 10; ++trial) {
            const int n = 1 + trial % 2;
            const DensityMatrix a = random_mixed(n, 1 << n, rng);
            const DensityMatrix b = random_mixed(n, 1 + trial % (1 << n), rng);
            VfeOptions o;
            o.mode = PurificationMode::exact;
            o.opt_fid.seed = trial;
            const auto r = vfe(a, b, o);
            CHECK(r.estimate <= exact_fidelity(a, b) + 1e-9);
            CHECK(r.one_sided());
            CHECK(r.traces.size() == 1);
        }
    }
    SUBCASE("mismatched registers") {
        CHECK_THROWS_AS(vfe(plus(), maximally_mixed(2)), DimensionError);
    }
}

TEST_CASE("nvtde") {
    Rng rng(6);
    SUBCASE("pure input stops at k = 1") {
        for (int trial = 0; trial < 3; ++trial) {
            const DensityMatrix p = density_from_vector(random_pure(2, rng));
            NvtdeOptions o;
            o.depth = 8;
            o.opt.seed = trial;
            const auto r = nvtde(p, random_mixed(2, 4, rng), o);
            CHECK(r.best_k == 1);
            CHECK(r.result.one_sided());
        }
    }
    SUBCASE("identical states") {
        const DensityMatrix s = random_mixed(2, 3, rng);
        const auto r = nvtde(s, s);
        CHECK(r.best_k == 1);
        CHECK(r.k_profile.size() <= 2);
        CHECK(std::abs(r.result.estimate) < 1e-6);
    }
    SUBCASE("k at the positive count matches vtde") {
        for (int trial = 0; trial < 5; ++trial) {
            const DensityMatrix a = random_mixed(2, 2 + trial % 3, rng);
            const DensityMatrix b = random_mixed(2, 4, rng);
            const std::size_t pos = count_positive_eigs(a.matrix() - b.matrix());
            NvtdeOptions no;
            no.depth = 8;
            no.fixed_k = pos;
            no.opt.seed = trial;
            VtdeOptions vo;
            vo.depth = 8;
            vo.opt.seed = trial;
            const auto n = nvtde(a, b, no);
            const auto v = vtde(a, b, vo);
            CHECK(std::abs(n.result.estimate - v.estimate) <= 0.02 * *v.oracle);
            CHECK(n.result.one_sided());
        }
    }
    SUBCASE("fixed k out of range") {
        NvtdeOptions o;
        o.fixed_k = 4;
        CHECK_THROWS_AS(nvtde(maximally_mixed(2), maximally_mixed(2), o), RangeError);
    }
}

TEST_CASE("estimate JSON carries the configuration") {
    VtdeOptions o;
    o.opt.seed = 5;
    const auto r = vtde(plus(), deph(0.3), o);
    const auto j = to_json(r);
    CHECK(j.at("algorithm") == "vtde");
    CHECK(j.at("config").at("optimizer").at("seed") == 5);
    CHECK(j.at("oracle").get<double>() == doctest::Approx(0.3));
}
