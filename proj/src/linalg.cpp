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

#include "qmetric/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qmetric/error.hpp"

namespace qmetric {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
    }
    if (!all_finite()) {
        throw InvariantViolation("ComplexMatrix: non-finite entry");
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(i, i) = values[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(i, i) = values[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> a, std::span<const Complex> b) {
    ComplexMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            m(i, j) = a[i] * std::conj(b[j]);
        }
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

Complex ComplexMatrix::trace() const {
    if (!is_square()) {
        throw DimensionError("trace: matrix is not square");
    }
    Complex t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

bool ComplexMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionError("matrix addition: shape mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionError("matrix subtraction: shape mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= other.data_[i];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scalar) {
    for (auto& z : data_) {
        z *= scalar;
    }
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) {
        throw DimensionError("matrix product: inner dimensions differ");
    }
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{0.0, 0.0}) {
                continue;
            }
            const Complex* brow = &b.data_[k * b.cols_];
            Complex* orow = &out.data_[i * out.cols_];
            for (std::size_t j = 0; j < b.cols_; ++j) {
                orow[j] += aik * brow[j];
            }
        }
    }
    return out;
}

ComplexMatrix operator-(ComplexMatrix a) {
    for (auto& z : a.data_) {
        z = -z;
    }
    return a;
}

std::vector<Complex> multiply(const ComplexMatrix& m, std::span<const Complex> v) {
    if (m.cols() != v.size()) {
        throw DimensionError("matrix-vector product: size mismatch");
    }
    std::vector<Complex> out(m.rows(), Complex{0.0, 0.0});
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Complex acc{0.0, 0.0};
        for (std::size_t c = 0; c < m.cols(); ++c) {
            acc += m(r, c) * v[c];
        }
        out[r] = acc;
    }
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("max_abs_diff: shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

double hermiticity_error(const ComplexMatrix& h) {
    if (!h.is_square()) {
        throw DimensionError("hermiticity check: matrix is not square");
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < h.rows(); ++r) {
        for (std::size_t c = r; c < h.cols(); ++c) {
            worst = std::max(worst, std::abs(h(r, c) - std::conj(h(c, r))));
        }
    }
    return worst;
}

double unitarity_error(const ComplexMatrix& u) {
    if (!u.is_square()) {
        throw DimensionError("unitarity check: matrix is not square");
    }
    return max_abs_diff(u * u.adjoint(), ComplexMatrix::identity(u.rows()));
}

ComplexMatrix symmetrized(const ComplexMatrix& h, double tol) {
    const double err = hermiticity_error(h);
    if (err > tol) {
        throw StructureError("matrix is not Hermitian (max |H - H^dagger| = " +
                             std::to_string(err) + ")");
    }
    ComplexMatrix out(h.rows(), h.cols());
    for (std::size_t r = 0; r < h.rows(); ++r) {
        out(r, r) = h(r, r).real();
        for (std::size_t c = r + 1; c < h.cols(); ++c) {
            const Complex v = 0.5 * (h(r, c) + std::conj(h(c, r)));
            out(r, c) = v;
            out(c, r) = std::conj(v);
        }
    }
    return out;
}

double trace_product_real(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.is_square() || a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("trace of product: shape mismatch");
    }
    const std::size_t n = a.rows();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Complex x = a(i, j);
            const Complex y = b(j, i);
            acc += x.real() * y.real() - x.imag() * y.imag();
        }
    }
    return acc;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const Complex x = a(ar, ac);
            if (x == Complex{0.0, 0.0}) {
                continue;
            }
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = x * b(br, bc);
                }
            }
        }
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m,
                            std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
    if (!m.is_square()) {
        throw DimensionError("partial_trace: matrix is not square");
    }
    const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                              std::multiplies<>());
    if (total != m.rows()) {
        throw DimensionError("partial_trace: subsystem dimensions multiply to " +
                             std::to_string(total) + ", matrix has dimension " +
                             std::to_string(m.rows()));
    }
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size()) {
            throw RangeError("partial_trace: kept subsystem index out of range");
        }
        kept[k] = true;
    }

    // Split every full index into a kept part and a traced part.
    std::vector<std::size_t> kept_index(total);
    std::vector<std::size_t> traced_index(total);
    std::size_t kept_dim = 1;
    for (std::size_t s = 0; s < dims.size(); ++s) {
        if (kept[s]) {
            kept_dim *= dims[s];
        }
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        std::size_t stride = total;
        std::size_t kpart = 0;
        std::size_t tpart = 0;
        for (std::size_t s = 0; s < dims.size(); ++s) {
            stride /= dims[s];
            const std::size_t digit = rem / stride;
            rem %= stride;
            if (kept[s]) {
                kpart = kpart * dims[s] + digit;
            } else {
                tpart = tpart * dims[s] + digit;
            }
        }
        kept_index[idx] = kpart;
        traced_index[idx] = tpart;
    }

    ComplexMatrix out(kept_dim, kept_dim);
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t c = 0; c < total; ++c) {
            if (traced_index[r] == traced_index[c]) {
                out(kept_index[r], kept_index[c]) += m(r, c);
            }
        }
    }
    return out;
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double acc = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            if (r != c) {
                acc += std::norm(a(r, c));
            }
        }
    }
    return std::sqrt(acc);
}

double frobenius_norm(const ComplexMatrix& a) {
    double acc = 0.0;
    for (const auto& z : a.data()) {
        acc += std::norm(z);
    }
    return std::sqrt(acc);
}

// One two-sided rotation W^dagger A W zeroing A(p,q), with
// W = diag(1, conj(e)) * [[c, s], [-s, c]] restricted to rows/cols p, q.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const Complex apq = a(p, q);
    const double g = std::abs(apq);
    if (g == 0.0) {
        return;
    }
    const Complex e = apq / g;
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double tau = (aqq - app) / (2.0 * g);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const Complex ec = std::conj(e);
    const std::size_t n = a.rows();

    for (std::size_t k = 0; k < n; ++k) {
        const Complex x = a(k, p);
        const Complex y = a(k, q);
        a(k, p) = x * c - y * (s * ec);
        a(k, q) = x * s + y * (c * ec);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Complex x = a(p, k);
        const Complex y = a(q, k);
        a(p, k) = x * c - y * (s * e);
        a(q, k) = x * s + y * (c * e);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Complex x = v(k, p);
        const Complex y = v(k, q);
        v(k, p) = x * c - y * (s * ec);
        v(k, q) = x * s + y * (c * ec);
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();
}

} // namespace

HermitianEig herm_eig(const ComplexMatrix& h) {
    ComplexMatrix a = symmetrized(h);
    const std::size_t n = a.rows();
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double tol = 1e-12 * std::max(1.0, frobenius_norm(a));
    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) < tol) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                jacobi_rotate(a, v, p, q);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() > a(j, j).real();
    });

    HermitianEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]).real();
        for (std::size_t r = 0; r < n; ++r) {
            out.eigenvectors(r, j) = v(r, order[j]);
        }
    }
    return out;
}

std::vector<double> herm_eigenvalues(const ComplexMatrix& h) {
    return herm_eig(h).eigenvalues;
}

ComplexMatrix mat_sqrt_psd(const ComplexMatrix& m) {
    const HermitianEig eig = herm_eig(m);
    const std::size_t n = m.rows();
    std::vector<double> roots(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lambda = eig.eigenvalues[j];
        if (lambda < -1e-10) {
            throw InvariantViolation("mat_sqrt_psd: negative eigenvalue " +
                                     std::to_string(lambda));
        }
        roots[j] = std::sqrt(std::max(lambda, 0.0));
    }
    ComplexMatrix out(n, n);
    const ComplexMatrix& vecs = eig.eigenvectors;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r; c < n; ++c) {
            Complex acc{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) {
                acc += vecs(r, j) * roots[j] * std::conj(vecs(c, j));
            }
            out(r, c) = acc;
            out(c, r) = std::conj(acc);
        }
        out(r, r) = out(r, r).real();
    }
    return out;
}

double trace_norm(const ComplexMatrix& h) {
    double acc = 0.0;
    for (double lambda : herm_eigenvalues(h)) {
        acc += std::abs(lambda);
    }
    return acc;
}

double top_k_eig_sum(const ComplexMatrix& h, std::size_t k) {
    if (!h.is_square()) {
        throw DimensionError("top_k_eig_sum: matrix is not square");
    }
    if (k < 1 || k > h.rows()) {
        throw RangeError("top_k_eig_sum: k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(h.rows()) + "]");
    }
    const auto eigs = herm_eigenvalues(h);
    return std::accumulate(eigs.begin(), eigs.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
}

} // namespace qmetric
