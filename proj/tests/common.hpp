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

#include <cmath>
#include <vector>

#include "qmetric/algorithms.hpp"
#include "qmetric/circuits.hpp"
#include "qmetric/error.hpp"
#include "qmetric/linalg.hpp"
#include "qmetric/losses.hpp"
#include "qmetric/optim.hpp"
#include "qmetric/oracles.hpp"
#include "qmetric/rng.hpp"
#include "qmetric/states.hpp"
#include "reference.hpp"

namespace t {

using namespace qmetric;

inline ref::Mat to_ref(const ComplexMatrix& m) {
    ref::Mat r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            r(i, j) = m(i, j);
    return r;
}

inline ComplexMatrix from_ref(const ref::Mat& r) {
    return ComplexMatrix(r.n, r.n, r.a);
}

inline ComplexMatrix random_hermitian(std::size_t d, Rng& rng) {
    ComplexMatrix h(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        h(i, i) = rng.normal();
        for (std::size_t j = i + 1; j < d; ++j) {
            h(i, j) = rng.complex_normal();
            h(j, i) = std::conj(h(i, j));
        }
    }
    return h;
}

inline ComplexMatrix random_psd(std::size_t d, Rng& rng) {
    ComplexMatrix g(d, d);
    for (auto& z : g.data()) {
        z = rng.complex_normal();
    }
    return g * g.adjoint();
}

inline ComplexMatrix diag(std::initializer_list<double> v) {
    std::vector<double> d(v);
    return ComplexMatrix::diagonal(d);
}

inline DensityMatrix dm(const ComplexMatrix& m) { return DensityMatrix::from_matrix(m); }

} // namespace t
