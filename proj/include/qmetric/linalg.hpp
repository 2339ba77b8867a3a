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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qmetric {

using Complex = std::complex<double>;

/// Hermiticity tolerance on the max-entry norm of H - H^dagger.
inline constexpr double kHermitianTol = 1e-10;

/// Dense complex matrix stored row-major.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> values);
    static ComplexMatrix diagonal(std::span<const Complex> values);
    /// Outer product |a><b|.
    static ComplexMatrix outer(std::span<const Complex> a, std::span<const Complex> b);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<Complex> data() noexcept { return data_; }
    [[nodiscard]] std::span<const Complex> data() const noexcept { return data_; }

    [[nodiscard]] ComplexMatrix adjoint() const;
    [[nodiscard]] Complex trace() const;
    [[nodiscard]] bool all_finite() const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scalar);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator-(ComplexMatrix a);

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Matrix-vector product.
std::vector<Complex> multiply(const ComplexMatrix& m, std::span<const Complex> v);

/// Largest |a_ij - b_ij|; throws DimensionError on shape mismatch.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Largest |h_ij - conj(h_ji)|.
double hermiticity_error(const ComplexMatrix& h);

/// Largest entry of |U U^dagger - I|.
double unitarity_error(const ComplexMatrix& u);

/// (H + H^dagger) / 2 after checking ||H - H^dagger||_max <= tol.
ComplexMatrix symmetrized(const ComplexMatrix& h, double tol = kHermitianTol);

/// Re tr(A B) for square matrices of equal size.
double trace_product_real(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Reduced operator on the subsystems listed in `keep`. Subsystem 0 is the
/// most significant factor of the row/column index. `keep` is interpreted as a
/// set; the output orders kept subsystems by ascending index.
ComplexMatrix partial_trace(const ComplexMatrix& m,
                            std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

struct HermitianEig {
    std::vector<double> eigenvalues; ///< non-increasing
    ComplexMatrix eigenvectors;      ///< column j pairs with eigenvalues[j]
};

/// Cyclic complex Jacobi diagonalization. The input must be Hermitian within
/// kHermitianTol; it is symmetrized before the sweeps start.
HermitianEig herm_eig(const ComplexMatrix& h);

/// Eigenvalues only, non-increasing.
std::vector<double> herm_eigenvalues(const ComplexMatrix& h);

/// PSD square root. Eigenvalues in [-1e-10, 0) are clamped to zero; anything
/// more negative raises InvariantViolation.
ComplexMatrix mat_sqrt_psd(const ComplexMatrix& m);

/// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const ComplexMatrix& h);

/// Sum of the k largest eigenvalues, 1 <= k <= dim.
double top_k_eig_sum(const ComplexMatrix& h, std::size_t k);

} // namespace qmetric
