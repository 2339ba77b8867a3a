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

#include <cstddef>

#include "qmetric/linalg.hpp"
#include "qmetric/states.hpp"

namespace qmetric {

/// 1/2 ||rho - sigma||_1.
double exact_trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// tr sqrt(sqrt(rho) sigma sqrt(rho)), clamped to [0, 1].
double exact_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

std::size_t count_positive_eigs(const ComplexMatrix& h, double threshold = 1e-10);

struct Prop1Result {
    double optimum = 0.0;       ///< sum of the d_B largest eigenvalues
    double witness_value = 0.0; ///< tr |0><0|_A V^dagger H V
    ComplexMatrix witness;      ///< V^dagger, the optimal unitary
};

/// max_U tr[(|0><0|_A (x) I_B) U H U^dagger] over unitaries on d_A d_B.
Prop1Result prop1_optimum(const ComplexMatrix& h, std::size_t d_a, std::size_t d_b);

/// tr[(|0><0|_A (x) I_B) H], the diagonal block sum with A as the leading
/// factor.
double proj0_block_trace(const ComplexMatrix& h, std::size_t d_a, std::size_t d_b);

/// Fidelity ceiling reachable by a purification with d_R = 2^{n_R}:
/// sqrt(sum of the top d_R eigenvalues), 1 when the rank fits.
double purification_fidelity_bound(const DensityMatrix& rho, std::size_t d_r);

} // namespace qmetric
