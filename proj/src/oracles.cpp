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

#include "qmetric/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmetric/error.hpp"

namespace qmetric {

namespace {

void same_dim(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("states have dimensions " + std::to_string(a.dim()) + " and " +
                             std::to_string(b.dim()));
    }
}

// sqrt of a density operator with eigenvalues at rounding level set to zero
ComplexMatrix support_sqrt(const ComplexMatrix& m) {
    const HermitianEig eig = herm_eig(m);
    const std::size_t n = m.rows();
    ComplexMatrix out(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lambda = eig.eigenvalues[j];
        if (lambda <= 1e-14) {
            continue;
        }
        const double root = std::sqrt(lambda);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                out(r, c) += eig.eigenvectors(r, j) * root * std::conj(eig.eigenvectors(c, j));
            }
        }
    }
    return out;
}

} // namespace

double exact_trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    same_dim(rho, sigma);
    return std::clamp(0.5 * trace_norm(rho.matrix() - sigma.matrix()), 0.0, 1.0);
}

double exact_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    same_dim(rho, sigma);
    const ComplexMatrix a = support_sqrt(rho.matrix()) * support_sqrt(sigma.matrix());
    const std::size_t d = a.rows();
    ComplexMatrix dil(2 * d, 2 * d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            dil(i, d + j) = a(i, j);
            dil(d + j, i) = std::conj(a(i, j));
        }
    }
    return std::clamp(0.5 * trace_norm(dil), 0.0, 1.0);
}

std::size_t count_positive_eigs(const ComplexMatrix& h, double threshold) {
    const auto ev = herm_eigenvalues(h);
    return static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [&](double x) { return x > threshold; }));
}

double proj0_block_trace(const ComplexMatrix& h, std::size_t d_a, std::size_t d_b) {
    if (!h.is_square() || h.rows() != d_a * d_b) {
        throw DimensionError("operator of size " + std::to_string(h.rows()) + " does not factor as " +
                             std::to_string(d_a) + " x " + std::to_string(d_b));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < d_b; ++i) {
        acc += h(i, i).real();
    }
    return acc;
}

Prop1Result prop1_optimum(const ComplexMatrix& h, std::size_t d_a, std::size_t d_b) {
    if (d_a == 0 || d_b == 0 || !h.is_square() || h.rows() != d_a * d_b) {
        throw DimensionError("operator does not factor as d_A x d_B");
    }
    const HermitianEig eig = herm_eig(h);
    Prop1Result out;
    out.optimum = top_k_eig_sum(h, d_b);
    out.witness = eig.eigenvectors.adjoint();
    const ComplexMatrix rotated = out.witness * h * eig.eigenvectors;
    out.witness_value = proj0_block_trace(rotated, d_a, d_b);
    return out;
}

double purification_fidelity_bound(const DensityMatrix& rho, std::size_t d_r) {
    if (d_r == 0) {
        throw RangeError("ancilla dimension must be positive");
    }
    if (d_r >= rho.dim()) {
        return 1.0;
    }
    return std::sqrt(std::clamp(top_k_eig_sum(rho.matrix(), d_r), 0.0, 1.0));
}

} // namespace qmetric
