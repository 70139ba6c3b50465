/*
 * Copyright 2026 The lotomo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lotomo/types.hpp"

namespace lotomo {

/// Counting results. All arithmetic is exact; anything that does not fit
/// throws OverflowError instead of wrapping.
using Count = std::uint64_t;

/// Binomial coefficient C(n, k); zero when k > n.
Count binomial(std::uint64_t n, std::uint64_t k);

/// D_{N,M}: number of N-photon Fock states over M modes.
Count fock_dimension(int photons, int modes);

/// Minimal number of interferometer configurations when the measured modes
/// equal the input modes: C(N+M, N) - C(N+M-2, M).
Count min_configs(int photons, int modes);

/// Minimal number of configurations with M' >= M measured modes, evaluated
/// as an exact rational ceiling of the factorial ratio times R_{N,M}.
Count min_configs_extended(int photons, int modes, int measured_modes);

/// Same quantity via ceil(R_{N,M} D_{N,M-1} / D_{N,M'-1}). Kept as an
/// independent route so both closed forms can be cross-checked.
Count min_configs_extended_dimension_ratio(int photons, int modes, int measured_modes);

/// Number of zero-weight states in the irrep (l, 0, ..., 0, -l): C(l+M-2, l).
Count zero_weight_dim(int l, int modes);

/// Highest weight of a U(M) irrep. Parts are non-increasing and may be
/// negative.
class Signature {
public:
    explicit Signature(std::vector<int> parts);

    std::span<const int> parts() const { return parts_; }
    int size() const { return static_cast<int>(parts_.size()); }
    int operator[](int i) const { return parts_[static_cast<std::size_t>(i)]; }

    /// Sum of the positive parts, |lambda_+|.
    int positive_weight() const;

    friend bool operator==(const Signature&, const Signature&) = default;

private:
    std::vector<int> parts_;
};

/// Weyl dimension formula for the irrep with highest weight `lambda`.
Count weyl_dimension(const Signature& lambda);

/// All non-increasing integer M-tuples summing to zero whose positive parts
/// sum to at most t. Ordered by |lambda_+| and then lexicographically
/// decreasing.
std::vector<Signature> enumerate_balanced_signatures(int modes, int t);

/// B(M, t): sum of squared dimensions over balanced signatures with
/// |lambda_+| <= t.
Count design_size_sum(int modes, int t);

struct DesignSizeBounds {
    Count lower = 0;          ///< B(M, N)
    Count upper = 0;          ///< B(M, 2N)
    Count theorem1_bound = 0; ///< D_{N,M^2}^2
};

DesignSizeBounds design_size_bounds(int modes, int photons);

/// True when a single M'-mode configuration can carry enough independent
/// outcomes: D_{N,M'-1} >= D_{N,M}^2 - D_{N-1,M}^2.
bool single_config_feasible(int photons, int modes, int measured_modes);

/// Smallest M' >= M for which single_config_feasible holds.
int min_modes_lower_bound(int photons, int modes);

} // namespace lotomo
