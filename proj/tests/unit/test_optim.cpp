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

#include <sstream>

#include "common.hpp"
#include "gradient_suite.hpp"

using namespace t;

TEST_CASE("shift rule on <Z> after Ry") {
    const AnsatzSpec a{AnsatzFamily::hardware_efficient, 1, 1};
    const ValueFn z = [&](std::span<const double> th) {
        const ComplexMatrix u = circuit_unitary(a, th);
        return std::norm(u(0, 0)) - std::norm(u(1, 0));
    };
    const ParamVector th{M_PI / 2, 0.3};
    CHECK(grad_shift_expectation(z, th, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(grad_shift_expectation(z, th, 1)) < 1e-15);
    CHECK_THROWS_AS(grad_shift_expectation(z, th, 2), RangeError);
}

TEST_CASE("constant L1 has zero gradient") {
    Rng rng(1);
    const DensityMatrix r = random_mixed(2, 3, rng);
    const VtdeContext ctx{{AnsatzFamily::hardware_efficient, 3, 2}, r, r, {}};
    const auto ce = make_vtde_expectation(ctx);
    for (int trial = 0; trial < 5; ++trial) {
        const ParamVector th = random_params(ce.n_params(), rng);
        std::vector<double> g(th.size());
        ce.value_and_gradient(th, g);
        CHECK(gradsuite::inf_norm(g) < 1e-14);
    }
}

TEST_CASE("gradients agree with central differences") {
    for (const auto& fam : gradsuite::run(50, 20261014)) {
        CAPTURE(fam.name);
        CHECK(fam.instances == 50);
        CHECK(fam.worst <= gradsuite::kRelTol);
    }
}

TEST_CASE("cached gradient equals the two-evaluation shift rule on deep circuits") {
    Rng rng(2);
    const DensityMatrix r = random_mixed(3, 2, rng);
    const DensityMatrix s = random_mixed(3, 8, rng);
    const VtdeContext ctx{{AnsatzFamily::hardware_efficient, 4, 6}, r, s, {}};
    const auto ce = make_vtde_expectation(ctx);
    const ParamVector th = random_params(ce.n_params(), rng);
    std::vector<double> fast(th.size());
    const double v = ce.value_and_gradient(th, fast);
    CHECK(v == doctest::Approx(loss_vtde(th, ctx)).epsilon(1e-12));
    const auto slow = grad_shift_expectation([&](std::span<const double> x) { return loss_vtde(x, ctx); }, th);
    for (std::size_t j = 0; j < th.size(); ++j) {
        CHECK(std::abs(fast[j] - slow[j]) < 1e-12);
    }
}

TEST_CASE("overlap gradient vanishes at a brute-force maximum") {
    Rng rng(3);
    const StateVector psi = purify_exact(random_mixed(1, 2, rng), 1);
    const StateVector phi = purify_exact(random_mixed(1, 2, rng), 1);
    const VfeContext ctx{{AnsatzFamily::hardware_efficient, 1, 1}, psi, phi, {}};
    auto f = [&](double a, double b) {
        const ParamVector th{a, b};
        return std::norm(vfe_amplitude(th, ctx));
    };
    double ca = 0.0, cb = 0.0, best = -1.0;
    for (int i = 0; i < 200; ++i) {
        for (int j = 0; j < 200; ++j) {
            const double a = 4 * M_PI * i / 200.0;
            const double b = 4 * M_PI * j / 200.0;
            if (f(a, b) > best) {
                best = f(a, b);
                ca = a;
                cb = b;
            }
        }
    }
    double half = 4 * M_PI / 200.0;
    for (int zoom = 0; zoom < 40; ++zoom) {
        double na = ca, nb = cb;
        for (int i = -10; i <= 10; ++i) {
            for (int j = -10; j <= 10; ++j) {
                const double a = ca + half * i / 10.0;
                const double b = cb + half * j / 10.0;
                if (f(a, b) > best) {
                    best = f(a, b);
                    na = a;
                    nb = b;
                }
            }
        }
        ca = na;
        cb = nb;
        half *= 0.5;
    }
    const ParamVector th{ca, cb};
    const double g0 = grad_overlap_shift(ctx, th, 0);
    const double g1 = grad_overlap_shift(ctx, th, 1);
    CHECK(std::hypot(g0, g1) < 1e-6);
    const auto fd = grad_finite_diff([&](std::span<const double> x) { return std::norm(vfe_amplitude(x, ctx)); }, th);
    CHECK(gradsuite::inf_norm(fd) < 1e-6);
    CHECK(std::sqrt(best) <= exact_fidelity(reduced_density(psi, 1), reduced_density(phi, 1)) + 1e-9);
}

TEST_CASE("orthogonal purifications have zero overlap gradient") {
    const StateVector psi = purify_exact(density_from_vector(basis_state(1, 0)), 1);
    const StateVector phi = purify_exact(density_from_vector(basis_state(1, 1)), 1);
    const VfeContext ctx{{AnsatzFamily::hardware_efficient, 1, 2}, psi, phi, {}};
    Rng rng(4);
    const ParamVector th = random_params(4, rng);
    std::vector<double> g(4);
    CHECK(loss_vfe_and_gradient(ctx, th, g) == 0.0);
    CHECK(gradsuite::inf_norm(g) == 0.0);
}

TEST_CASE("finite differences") {
    const std::vector<double> coeff{0.5, -1.25, 3.0};
    const ValueFn lin = [&](std::span<const double> th) {
        double s = 0.0;
        for (std::size_t j = 0; j < th.size(); ++j) s += coeff[j] * th[j];
        return s;
    };
    const ParamVector th{0.1, 2.0, -1.0};
    const auto g = grad_finite_diff(lin, th);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(g[j] - coeff[j]) < 1e-9);
    }
    // stationary point by symmetry: sum cos(theta_j - c_j) at theta = c
    const ValueFn cosines = [&](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += std::cos(x[j] - coeff[j]);
        return s;
    };
    CHECK(gradsuite::inf_norm(grad_finite_diff(cosines, coeff)) < 1e-10);
    CHECK(gradsuite::inf_norm(grad_shift_expectation(cosines, coeff)) < 1e-12);
}

namespace {

Objective bowl(const std::vector<double>& c) {
    Objective o;
    o.n_params = c.size();
    o.value = [c](std::span<const double> th) {
        double s = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) s -= (th[j] - c[j]) * (th[j] - c[j]);
        return s;
    };
    o.value_and_gradient = [c](std::span<const double> th, std::span<double> g) {
        double s = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            s -= (th[j] - c[j]) * (th[j] - c[j]);
            g[j] = -2.0 * (th[j] - c[j]);
        }
        return s;
    };
    return o;
}

} // namespace

TEST_CASE("optimizer converges on a quadratic bowl") {
    const std::vector<double> c{1.0, -2.0, 0.5, 3.0};
    for (OptimMethod method : {OptimMethod::gd, OptimMethod::adam}) {
        OptimConfig cfg;
        cfg.method = method;
        cfg.learning_rate = 0.1;
        cfg.iterations = 200;
        cfg.restarts = 2;
        cfg.seed = 9;
        const OptimTrace tr = run_optimizer(bowl(c), cfg);
        CAPTURE(to_string(method));
        for (std::size_t j = 0; j < c.size(); ++j) {
            CHECK(std::abs(tr.best_theta[j] - c[j]) < 1e-3);
        }
    }
}

TEST_CASE("optimizer bookkeeping") {
    Rng rng(5);
    const DensityMatrix r = random_mixed(1, 2, rng);
    const DensityMatrix s = random_mixed(1, 1, rng);
    const VtdeContext ctx{{AnsatzFamily::hardware_efficient, 2, 2}, r, s, {}};
    const auto ce = make_vtde_expectation(ctx);
    Objective obj;
    obj.n_params = ce.n_params();
    obj.value = [&](std::span<const double> th) { return ce.value(th); };
    obj.value_and_gradient = [&](std::span<const double> th, std::span<double> g) {
        return ce.value_and_gradient(th, g);
    };
    OptimConfig cfg = vtde_defaults(77);

    SUBCASE("seeded runs are bit-reproducible") {
        const auto a = run_optimizer(obj, cfg);
        const auto b = run_optimizer(obj, cfg);
        REQUIRE(a.restarts.size() == b.restarts.size());
        for (std::size_t k = 0; k < a.restarts.size(); ++k) {
            CHECK(a.restarts[k].losses == b.restarts[k].losses);
        }
        CHECK(a.best_theta == b.best_theta);
    }
    SUBCASE("best loss is the extreme recorded iterate") {
        for (Direction d : {Direction::maximize, Direction::minimize}) {
            cfg.direction = d;
            const auto tr = run_optimizer(obj, cfg);
            double ext = tr.restarts[0].losses[0];
            for (const auto& rt : tr.restarts) {
                for (double v : rt.losses) {
                    ext = d == Direction::maximize ? std::max(ext, v) : std::min(ext, v);
                }
            }
            CHECK(tr.best_loss == ext);
            CHECK(ce.value(tr.best_theta) == tr.best_loss);
            CHECK(tr.total_iterations() == cfg.iterations * cfg.restarts);
        }
    }
    SUBCASE("zero learning rate leaves the parameters unchanged") {
        cfg.learning_rate = 0.0;
        const auto tr = run_optimizer(obj, cfg);
        for (std::size_t k = 0; k < tr.restarts.size(); ++k) {
            Rng init(cfg.seed + k);
            const double f0 = ce.value(random_params(obj.n_params, init));
            for (double v : tr.restarts[k].losses) {
                CHECK(v == f0);
            }
        }
        Rng init(cfg.seed + tr.best_restart);
        CHECK(tr.best_theta == random_params(obj.n_params, init));
    }
    SUBCASE("finite-difference mode tracks the shift-rule run") {
        OptimConfig fd = cfg;
        fd.gradient = GradientKind::finite_diff;
        const auto a = run_optimizer(obj, cfg);
        const auto b = run_optimizer(obj, fd);
        CHECK(std::abs(a.best_loss - b.best_loss) < 1e-6);
    }
}

TEST_CASE("non-finite losses abort one restart only") {
    int calls = 0;
    Objective obj = bowl({0.0, 0.0});
    const ValueGradFn inner = obj.value_and_gradient;
    obj.value_and_gradient = [&](std::span<const double> th, std::span<double> g) {
        const int c = calls++;
        return c == 10 ? std::nan("") : inner(th, g);
    };
    OptimConfig cfg;
    cfg.iterations = 10;
    cfg.restarts = 3;
    const auto tr = run_optimizer(obj, cfg);
    CHECK(tr.any_aborted());
    CHECK(tr.restarts[1].aborted);
    CHECK(tr.restarts[1].losses.empty());
    CHECK(tr.restarts[0].losses.size() == 10);
    CHECK(tr.restarts[2].losses.size() == 10);

    Objective nan_obj = bowl({0.0});
    nan_obj.value_and_gradient = [](std::span<const double>, std::span<double> g) {
        g[0] = 0.0;
        return std::numeric_limits<double>::infinity();
    };
    CHECK_THROWS_AS(run_optimizer(nan_obj, cfg), InvariantViolation);
}

TEST_CASE("optimizer config validation and serialization") {
    OptimConfig c = vfe_defaults(3, Direction::minimize);
    CHECK(c.learning_rate == 0.2);
    CHECK(c.iterations == 100);
    const OptimConfig back = optim_config_from_json(to_json(c), OptimConfig{});
    CHECK(back.learning_rate == c.learning_rate);
    CHECK(back.iterations == c.iterations);
    CHECK(back.direction == Direction::minimize);
    CHECK(back.seed == 3);
    CHECK_THROWS_AS(optim_config_from_json({{"lr", 0.1}}, c), DimensionError);
    CHECK_THROWS_AS(optim_config_from_json({{"method", "sgd"}}, c), DimensionError);
    CHECK_THROWS_AS(optim_config_from_json({{"iterations", 0}}, c), RangeError);
    c.learning_rate = -1.0;
    CHECK_THROWS_AS(validate(c), RangeError);
    c.learning_rate = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(validate(c), RangeError);
}

TEST_CASE("trace CSV") {
    OptimTrace tr;
    tr.restarts.push_back({{0.5, 0.25}, false});
    tr.restarts.push_back({{1.0 / 3.0}, false});
    std::ostringstream os;
    write_trace_csv(os, tr);
    CHECK(os.str() == "iteration,restart,loss\n0,0,0.5\n1,0,0.25\n0,1,0.333333333333\n");
}
