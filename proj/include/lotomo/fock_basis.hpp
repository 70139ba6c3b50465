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

#include <cstddef>
#include <span>
#include <vector>

#include "lotomo/combinatorics.hpp"
#include "lotomo/types.hpp"

namespace lotomo {

/// N-photon occupation vectors over M modes in lexicographically decreasing
/// order, so (N, 0, ..., 0) sits at index 0 and (0, ..., 0, N) is last.
class FockBasis {
public:
    FockBasis(int photons, int modes);

    int photons() const { return photons_; }
    int modes() const { return modes_; }
    std::size_t size() const { return states_.size(); }

    const Occupation& state_at(std::size_t index) const { return states_.at(index); }
    const std::vector<Occupation>& states() const { return states_; }

    /// Rank of an occupation vector. Computed combinatorially, not by search.
    std::size_t index_of(std::span<const int> occupation) const;

    bool contains(std::span<const int> occupation) const;

    friend bool operator==(const FockBasis& a, const FockBasis& b) {
        return a.photons_ == b.photons_ && a.modes_ == b.modes_;
    }

private:
    int photons_;
    int modes_;
    std::vector<Occupation> states_;
};

FockBasis enumerate_fock_basis(int photons, int modes);

/// Product of factorials of the occupations.
double occupation_factorial(std::span<const int> occupation);

int total_photons(std::span<const int> occupation);

} // namespace lotomo
