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

#include "qmetric/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qmetric/error.hpp"

namespace qmetric {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

} // namespace

int qubits_for_dim(std::size_t dim) {
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
    }
    int n = 0;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    return n;
}

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m) {
    if (!m.is_square()) {
        throw DimensionError("density matrix must be square");
    }
    const int n = qubits_for_dim(m.rows());
    if (!m.all_finite()) {
        throw InvariantViolation("density matrix has non-finite entries");
    }
    const double herm = hermiticity_error(m);
    if (herm > kStateTol) {
        throw InvariantViolation("hermiticity violation: max |rho - rho^dagger| = " + fmt(herm));
    }
    ComplexMatrix sym = symmetrized(m);
    const double tr = sym.trace().real();
    if (std::abs(tr - 1.0) > kStateTol) {
        throw InvariantViolation("trace violation: tr(rho) = " + fmt(tr));
    }
    const auto eigs = herm_eigenvalues(sym);
    if (eigs.back() < -kStateTol) {
        throw InvariantViolation("positivity violation: smallest eigenvalue " + fmt(eigs.back()));
    }
    return DensityMatrix(n, std::move(sym));
}

DensityMatrix make_density_unchecked(ComplexMatrix m) {
    if (!m.is_square()) {
        throw DimensionError("density matrix must be square");
    }
    const int n = qubits_for_dim(m.rows());
    return DensityMatrix(n, symmetrized(m, 1e-8));
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amp) {
    const int n = qubits_for_dim(amp.size());
    double norm2 = 0.0;
    for (const auto& a : amp) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw InvariantViolation("state vector has non-finite amplitudes");
        }
        norm2 += std::norm(a);
    }
    const double norm = std::sqrt(norm2);
    if (std::abs(norm - 1.0) > kStateTol) {
        throw InvariantViolation("norm violation: ||psi|| = " + fmt(norm));
    }
    return StateVector(n, std::move(amp));
}

DensityMatrix density_from_vector(const StateVector& v) {
    return make_density_unchecked(ComplexMatrix::outer(v.amplitudes(), v.amplitudes()));
}

StateVector ghz(int n) {
    if (n < 1) {
        throw RangeError("ghz: need at least one qubit");
    }
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Complex> amp(dim, Complex{0.0, 0.0});
    amp.front() = std::numbers::sqrt2 / 2.0;
    amp.back() = std::numbers::sqrt2 / 2.0;
    return StateVector::from_amplitudes(std::move(amp));
}

StateVector basis_state(int n, std::size_t index) {
    const std::size_t dim = std::size_t{1} << n;
    if (index >= dim) {
        throw RangeError("basis_state: index out of range");
    }
    std::vector<Complex> amp(dim, Complex{0.0, 0.0});
    amp[index] = 1.0;
    return StateVector::from_amplitudes(std::move(amp));
}

StateVector plus_state() { return ghz(1); }

DensityMatrix maximally_mixed(int n) {
    const std::size_t dim = std::size_t{1} << n;
    return make_density_unchecked(ComplexMatrix::identity(dim) * Complex{1.0 / static_cast<double>(dim)});
}

DensityMatrix apply_channel(const DensityMatrix& rho, const ChannelSpec& ch) {
    if (!(ch.p >= 0.0 && ch.p <= 1.0)) {
        throw RangeError("channel parameter p = " + fmt(ch.p) + " outside [0, 1]");
    }
    const ComplexMatrix& m = rho.matrix();
    switch (ch.kind) {
    case ChannelKind::depolarizing: {
        ComplexMatrix out = m * Complex{1.0 - ch.p};
        const double mix = ch.p * m.trace().real() / static_cast<double>(rho.dim());
        for (std::size_t i = 0; i < rho.dim(); ++i) {
            out(i, i) += mix;
        }
        return make_density_unchecked(std::move(out));
    }
    case ChannelKind::dephasing: {
        if (rho.n_qubits() != 1) {
            throw DimensionError("dephasing is defined for single-qubit states only");
        }
        // Z rho Z flips the sign of the coherences.
        ComplexMatrix out = m;
        out(0, 1) *= (1.0 - 2.0 * ch.p);
        out(1, 0) *= (1.0 - 2.0 * ch.p);
        return make_density_unchecked(std::move(out));
    }
    }
    throw RangeError("unknown channel kind");
}

StateVector random_pure(int n, Rng& rng) {
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Complex> amp(dim);
    double norm2 = 0.0;
    for (auto& a : amp) {
        a = rng.complex_normal();
        norm2 += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& a : amp) {
        a *= inv;
    }
    return StateVector::from_amplitudes(std::move(amp));
}

ComplexMatrix random_isometry(std::size_t d, std::size_t k, Rng& rng) {
    if (k > d || k == 0) {
        throw RangeError("random_isometry: need 1 <= k <= d");
    }
    ComplexMatrix q(d, k);
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<Complex> col(d);
        for (auto& z : col) {
            z = rng.complex_normal();
        }
        // Two passes of modified Gram-Schmidt keep the columns orthonormal to
        // machine precision.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t prev = 0; prev < c; ++prev) {
                Complex proj{0.0, 0.0};
                for (std::size_t r = 0; r < d; ++r) {
                    proj += std::conj(q(r, prev)) * col[r];
                }
                for (std::size_t r = 0; r < d; ++r) {
                    col[r] -= proj * q(r, prev);
                }
            }
        }
        double norm2 = 0.0;
        for (const auto& z : col) {
            norm2 += std::norm(z);
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t r = 0; r < d; ++r) {
            q(r, c) = col[r] * inv;
        }
    }
    return q;
}

ComplexMatrix random_unitary(std::size_t d, Rng& rng) { return random_isometry(d, d, rng); }

DensityMatrix random_mixed(int n, std::size_t k, Rng& rng) {
    const std::size_t dim = std::size_t{1} << n;
    if (k < 1 || k > dim) {
        throw RangeError("random_mixed: rank " + std::to_string(k) + " outside [1, " +
                         std::to_string(dim) + "]");
    }
    const ComplexMatrix v = random_isometry(dim, k, rng);
    std::vector<double> w(k);
    for (;;) {
        double total = 0.0;
        for (auto& x : w) {
            x = -std::log(rng.uniform());
            total += x;
        }
        for (auto& x : w) {
            x /= total;
        }
        if (*std::min_element(w.begin(), w.end()) > 1e-9) {
            break;
        }
    }
    ComplexMatrix m(dim, dim);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t r = 0; r < dim; ++r) {
            const Complex vr = v(r, j) * w[j];
            for (std::size_t c = 0; c < dim; ++c) {
                m(r, c) += vr * std::conj(v(c, j));
            }
        }
    }
    return make_density_unchecked(std::move(m));
}

std::size_t numerical_rank(const ComplexMatrix& h) {
    const auto eigs = herm_eigenvalues(h);
    return static_cast<std::size_t>(
        std::count_if(eigs.begin(), eigs.end(), [](double x) { return x > kRankTol; }));
}

StateVector purify_exact(const DensityMatrix& rho, int n_r) {
    if (n_r < 0) {
        throw RangeError("purify_exact: negative ancilla count");
    }
    const HermitianEig eig = herm_eig(rho.matrix());
    const std::size_t rank = static_cast<std::size_t>(std::count_if(
        eig.eigenvalues.begin(), eig.eigenvalues.end(), [](double x) { return x > kRankTol; }));
    const std::size_t d_r = std::size_t{1} << n_r;
    if (rank > d_r) {
        throw RangeError("purify_exact: rank " + std::to_string(rank) + " exceeds ancilla dimension " +
                         std::to_string(d_r));
    }
    const std::size_t d_a = rho.dim();
    std::vector<Complex> amp(d_a * d_r, Complex{0.0, 0.0});
    double norm2 = 0.0;
    for (std::size_t j = 0; j < rank; ++j) {
        const double weight = std::sqrt(eig.eigenvalues[j]);
        for (std::size_t a = 0; a < d_a; ++a) {
            amp[a * d_r + j] = weight * eig.eigenvectors(a, j);
            norm2 += std::norm(amp[a * d_r + j]);
        }
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& z : amp) {
        z *= inv;
    }
    return StateVector::from_amplitudes(std::move(amp));
}

DensityMatrix reduced_density(const StateVector& psi, int n_a) {
    if (n_a < 1 || n_a > psi.n_qubits()) {
        throw RangeError("reduced_density: kept qubit count out of range");
    }
    const std::size_t d_a = std::size_t{1} << n_a;
    const std::size_t d_r = psi.dim() / d_a;
    const auto amp = psi.amplitudes();
    ComplexMatrix out(d_a, d_a);
    for (std::size_t a = 0; a < d_a; ++a) {
        for (std::size_t b = a; b < d_a; ++b) {
            Complex acc{0.0, 0.0};
            for (std::size_t r = 0; r < d_r; ++r) {
                acc += amp[a * d_r + r] * std::conj(amp[b * d_r + r]);
            }
            out(a, b) = acc;
            out(b, a) = std::conj(acc);
        }
    }
    return make_density_unchecked(std::move(out));
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& z : m.data()) {
        entries.push_back({z.real(), z.imag()});
    }
    return {{"n_qubits", qubits_for_dim(m.rows())}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw DimensionError("state JSON: top level must be an object");
    }
    if (!j.contains("n_qubits") || !j["n_qubits"].is_number_integer()) {
        throw DimensionError("state JSON: field 'n_qubits' missing or not an integer");
    }
    if (!j.contains("entries") || !j["entries"].is_array()) {
        throw DimensionError("state JSON: field 'entries' missing or not an array");
    }
    const int n = j["n_qubits"].get<int>();
    if (n < 1 || n > 10) {
        throw DimensionError("state JSON: 'n_qubits' must lie in [1, 10]");
    }
    const std::size_t dim = std::size_t{1} << n;
    const auto& entries = j["entries"];
    if (entries.size() != dim * dim) {
        throw DimensionError("state JSON: 'entries' has " + std::to_string(entries.size()) +
                             " items, expected " + std::to_string(dim * dim));
    }
    std::vector<Complex> data;
    data.reserve(dim * dim);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw DimensionError("state JSON: entries[" + std::to_string(i) +
                                 "] must be a [re, im] number pair");
        }
        data.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return ComplexMatrix(dim, dim, std::move(data));
}

nlohmann::json to_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix()); }

DensityMatrix density_from_json(const nlohmann::json& j) {
    return DensityMatrix::from_matrix(matrix_from_json(j));
}

} // namespace qmetric
