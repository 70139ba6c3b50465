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

#include "lotomo/fock_basis.hpp"

#include <numeric>
#include <string>

namespace lotomo {

namespace {

void fill_states(int remaining, int mode, Occupation& current, std::vector<Occupation>& out) {
    const int modes = static_cast<int>(current.size());
    if (mode == modes - 1) {
        current[static_cast<std::size_t>(mode)] = remaining;
        out.push_back(current);
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        current[static_cast<std::size_t>(mode)] = v;
        fill_states(remaining - v, mode + 1, current, out);
    }
}

} // namespace

FockBasis::FockBasis(int photons, int modes) : photons_(photons), modes_(modes) {
    const Count dim = fock_dimension(photons, modes); // validates arguments
    states_.reserve(static_cast<std::size_t>(dim));
    Occupation current(static_cast<std::size_t>(modes), 0);
    fill_states(photons, 0, current, states_);
}

std::size_t FockBasis::index_of(std::span<const int> occupation) const {
    if (!contains(occupation)) {
        throw ValidationError("FockBasis::index_of: occupation vector not in basis (N=" +
                              std::to_string(photons_) + ", M=" + std::to_string(modes_) + ")");
    }
    std::size_t index = 0;
    int remaining = photons_;
    for (int i = 0; i + 1 < modes_; ++i) {
        const int v = occupation[static_cast<std::size_t>(i)];
        // Every state with a larger entry here precedes this one.
        for (int u = v + 1; u <= remaining; ++u) {
            index += static_cast<std::size_t>(fock_dimension(remaining - u, modes_ - i - 1));
        }
        remaining -= v;
    }
    return index;
}

bool FockBasis::contains(std::span<const int> occupation) const {
    if (occupation.size() != static_cast<std::size_t>(modes_)) return false;
    int total = 0;
    for (int v : occupation) {
        if (v < 0) return false;
        total += v;
    }
    return total == photons_;
}

FockBasis enumerate_fock_basis(int photons, int modes) { return FockBasis(photons, modes); }

double occupation_factorial(std::span<const int> occupation) {
    double f = 1.0;
    for (int v : occupation) {
        for (int k = 2; k <= v; ++k) f *= k;
    }
    return f;
}

int total_photons(std::span<const int> occupation) {
    return std::accumulate(occupation.begin(), occupation.end(), 0);
}

} // namespace lotomo
