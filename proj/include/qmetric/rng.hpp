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

#include <cstdint>
#include <random>
#include <string_view>

#include "qmetric/linalg.hpp"

namespace qmetric {

/// Seedable generator with a fixed, documented algorithm so that every run is
/// bit-reproducible across platforms. Only the raw engine output is used;
/// uniform and Gaussian variates are derived here rather than through the
/// implementation-defined std distributions.
class Rng {
  public:
    static constexpr std::string_view kAlgorithm = "mt19937_64+box-muller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the paired variate is cached.
    double normal();

    /// Complex Gaussian with E|z|^2 = 1.
    Complex complex_normal();

    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// splitmix64 finalizer; derives decorrelated child seeds from (base, stream).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace qmetric
