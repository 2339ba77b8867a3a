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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmetric/circuits.hpp"
#include "qmetric/losses.hpp"
#include "qmetric/optim.hpp"
#include "qmetric/states.hpp"

namespace qmetric {

struct EstimateResult {
    std::string algorithm;
    double estimate = 0.0;
    std::optional<double> oracle;
    std::optional<double> abs_error;
    std::optional<double> rel_error;
    /// Exact optimum of the optimized functional over all unitaries, for the
    /// inputs the final stage actually received. Exact-mode estimates never
    /// exceed it.
    std::optional<double> variational_bound;
    std::vector<std::string> stage_names;
    std::vector<OptimTrace> traces; ///< one per optimization stage
    nlohmann::json config;
    double wall_time = 0.0; ///< seconds
    std::vector<std::string> flags;

    void set_oracle(double value);
    [[nodiscard]] std::size_t iterations() const;
    [[nodiscard]] bool has_flag(const std::string& f) const;
    /// estimate <= variational_bound + tol (true when no bound is known).
    [[nodiscard]] bool one_sided(double tol = 1e-9) const;
};

nlohmann::json to_json(const EstimateResult& r);

struct VtdeOptions {
    int depth = 4;
    AnsatzFamily family = AnsatzFamily::hardware_efficient;
    OptimConfig opt = vtde_defaults();
    Shots shots; ///< finite-shot re-evaluation of the reported estimate
};

/// Maximizes L1 over a (n+1)-qubit ansatz; reports max(best, 0).
EstimateResult vtde(const DensityMatrix& rho, const DensityMatrix& sigma, const VtdeOptions& opts = {});

/// One optimization of 2 sum_j c_j O_j - sum_j c_j.
EstimateResult trace_norm_estimate(const HermitianDecomposition& decomp, const VtdeOptions& opts = {});

/// Sum of the maximizations for +H and -H.
EstimateResult trace_norm_two_sided(const ComplexMatrix& h, const VtdeOptions& opts = {});

struct VqslOptions {
    int n_r = 1;
    int depth = 6;
    AnsatzFamily family = AnsatzFamily::purification_u3;
    OptimConfig opt = vfe_defaults(0, Direction::minimize);
    Shots shots;
};

struct VqslResult {
    StateVector purification;
    double achieved_fidelity = 0.0; ///< F(rho, chi)
    double fidelity_bound = 1.0;    ///< sqrt of the top 2^{n_R} eigenvalue sum
    double best_loss = 0.0;
    OptimTrace trace;
};

VqslResult vqsl(const DensityMatrix& rho, const VqslOptions& opts = {});

enum class PurificationMode { vqsl, exact };

struct VfeOptions {
    int n_r = 0; ///< 0 selects n_R = n_A
    PurificationMode mode = PurificationMode::vqsl;
    int purify_depth = 6;
    int fidelity_depth = 6;
    OptimConfig opt_purify = vfe_defaults(0, Direction::minimize);
    OptimConfig opt_fid = vfe_defaults(0, Direction::maximize);
    Shots shots;
};

/// Learns purifications of rho and sigma, then maximizes |<psi|(I (x) U_R)|phi>|.
EstimateResult vfe(const DensityMatrix& rho, const DensityMatrix& sigma, const VfeOptions& opts = {});

struct NvtdeOptions {
    int depth = 4;
    AnsatzFamily family = AnsatzFamily::hardware_efficient;
    OptimConfig opt = vtde_defaults();
    double eps_k = 1e-4;
    std::optional<std::size_t> fixed_k;
};

struct NvtdeResult {
    EstimateResult result;
    std::vector<double> k_profile; ///< optimum of L4^k for k = 1, 2, ...
    std::size_t best_k = 1;
};

NvtdeResult nvtde(const DensityMatrix& rho, const DensityMatrix& sigma, const NvtdeOptions& opts = {});

std::string to_string(PurificationMode m);

} // namespace qmetric
