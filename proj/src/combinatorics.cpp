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

#include "lotomo/combinatorics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace lotomo {

namespace {

Count checked_mul(Count a, Count b) {
    Count out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw OverflowError("integer overflow: " + std::to_string(a) + " * " + std::to_string(b));
    }
    return out;
}

Count checked_add(Count a, Count b) {
    Count out = 0;
    if (__builtin_add_overflow(a, b, &out)) {
        throw OverflowError("integer overflow: " + std::to_string(a) + " + " + std::to_string(b));
    }
    return out;
}

// Non-negative rational kept in lowest terms after every update.
struct Fraction {
    Count num = 1;
    Count den = 1;

    void times(Count f) {
        const Count g = std::gcd(f, den);
        den /= g;
        num = checked_mul(num, f / g);
    }

    void divide_by(Count f) {
        if (f == 0) throw NumericalError("division by zero in exact fraction");
        const Count g = std::gcd(f, num);
        num /= g;
        den = checked_mul(den, f / g);
    }

    Count ceil() const { return num / den + (num % den != 0 ? 1 : 0); }
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

} // namespace

Count binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // r == C(n-k+i-1, i-1) here, so the division below is exact.
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<Count>::max()) {
            throw OverflowError("binomial(" + std::to_string(n) + ", " + std::to_string(k) + ") overflows");
        }
    }
    return static_cast<Count>(r);
}

Count fock_dimension(int photons, int modes) {
    require(photons >= 0, "fock_dimension: photon count must be non-negative");
    require(modes >= 1, "fock_dimension: mode count must be positive");
    return binomial(static_cast<Count>(photons) + modes - 1, static_cast<Count>(photons));
}

Count min_configs(int photons, int modes) {
    require(photons >= 1, "min_configs: need N >= 1");
    require(modes >= 2, "min_configs: need M >= 2");
    const Count n = static_cast<Count>(photons);
    const Count m = static_cast<Count>(modes);
    return binomial(n + m, n) - binomial(n + m - 2, m);
}

Count min_configs_extended(int photons, int modes, int measured_modes) {
    require(photons >= 1, "min_configs_extended: need N >= 1");
    require(modes >= 2, "min_configs_extended: need M >= 2");
    require(measured_modes >= modes, "min_configs_extended: need M' >= M");
    // (N+M-2)!/(M-2)! over (N+M'-2)!/(M'-2)!, i.e. two rising products of length N.
    Fraction f;
    f.times(min_configs(photons, modes));
    for (int i = 0; i < photons; ++i) {
        f.times(static_cast<Count>(modes - 1 + i));
        f.divide_by(static_cast<Count>(measured_modes - 1 + i));
    }
    return f.ceil();
}

Count min_configs_extended_dimension_ratio(int photons, int modes, int measured_modes) {
    require(photons >= 1, "min_configs_extended: need N >= 1");
    require(modes >= 2, "min_configs_extended: need M >= 2");
    require(measured_modes >= modes, "min_configs_extended: need M' >= M");
    Fraction f;
    f.times(min_configs(photons, modes));
    f.times(fock_dimension(photons, modes - 1));
    f.divide_by(fock_dimension(photons, measured_modes - 1));
    return f.ceil();
}

Count zero_weight_dim(int l, int modes) {
    require(l >= 0, "zero_weight_dim: need l >= 0");
    require(modes >= 2, "zero_weight_dim: need M >= 2");
    return binomial(static_cast<Count>(l) + modes - 2, static_cast<Count>(l));
}

Signature::Signature(std::vector<int> parts) : parts_(std::move(parts)) {
    require(!parts_.empty(), "Signature: need at least one part");
    for (std::size_t i = 1; i < parts_.size(); ++i) {
        require(parts_[i - 1] >= parts_[i], "Signature: parts must be non-increasing");
    }
}

int Signature::positive_weight() const {
    int s = 0;
    for (int p : parts_) s += std::max(p, 0);
    return s;
}

Count weyl_dimension(const Signature& lambda) {
    const int m = lambda.size();
    Fraction f;
    for (int k = 0; k < m; ++k) {
        for (int kp = k + 1; kp < m; ++kp) {
            const int gap = kp - k;
            f.times(static_cast<Count>(gap + lambda[k] - lambda[kp]));
            f.divide_by(static_cast<Count>(gap));
        }
    }
    if (f.den != 1) {
        throw NumericalError("weyl_dimension: product is not an integer");
    }
    return f.num;
}

namespace {

// Partitions of `total` into at most `max_parts` positive parts, each part
// bounded by `max_part`, emitted in non-increasing order.
void partitions(int total, int max_parts, int max_part, std::vector<int>& prefix,
                std::vector<std::vector<int>>& out) {
    if (total == 0) {
        out.push_back(prefix);
        return;
    }
    if (max_parts == 0) return;
    for (int p = std::min(total, max_part); p >= 1; --p) {
        prefix.push_back(p);
        partitions(total - p, max_parts - 1, p, prefix, out);
        prefix.pop_back();
    }
}

std::vector<std::vector<int>> partitions(int total, int max_parts) {
    std::vector<std::vector<int>> out;
    std::vector<int> prefix;
    partitions(total, max_parts, total, prefix, out);
    return out;
}

} // namespace

std::vector<Signature> enumerate_balanced_signatures(int modes, int t) {
    require(modes >= 2, "enumerate_balanced_signatures: need M >= 2");
    require(t >= 0, "enumerate_balanced_signatures: need t >= 0");
    std::vector<Signature> out;
    for (int s = 0; s <= t; ++s) {
        std::vector<std::vector<int>> level;
        // Sum zero forces |lambda_-| = |lambda_+| = s.
        const auto parts = partitions(s, modes);
        for (const auto& pos : parts) {
            for (const auto& neg : parts) {
                if (pos.size() + neg.size() > static_cast<std::size_t>(modes)) continue;
                std::vector<int> lambda(static_cast<std::size_t>(modes), 0);
                std::copy(pos.begin(), pos.end(), lambda.begin());
                for (std::size_t i = 0; i < neg.size(); ++i) {
                    lambda[lambda.size() - 1 - i] = -neg[i];
                }
                level.push_back(std::move(lambda));
            }
        }
        std::sort(level.begin(), level.end(), std::greater<>());
        for (auto& l : level) out.emplace_back(std::move(l));
    }
    return out;
}

Count design_size_sum(int modes, int t) {
    Count total = 0;
    for (const auto& lambda : enumerate_balanced_signatures(modes, t)) {
        const Count d = weyl_dimension(lambda);
        total = checked_add(total, checked_mul(d, d));
    }
    return total;
}

DesignSizeBounds design_size_bounds(int modes, int photons) {
    require(modes >= 2, "design_size_bounds: need M >= 2");
    require(photons >= 1, "design_size_bounds: need N >= 1");
    DesignSizeBounds b;
    b.lower = design_size_sum(modes, photons);
    b.upper = design_size_sum(modes, 2 * photons);
    const Count d = fock_dimension(photons, modes * modes);
    b.theorem1_bound = checked_mul(d, d);
    return b;
}

bool single_config_feasible(int photons, int modes, int measured_modes) {
    require(photons >= 1, "single_config_feasible: need N >= 1");
    require(modes >= 2, "single_config_feasible: need M >= 2");
    require(measured_modes >= modes, "single_config_feasible: need M' >= M");
    const Count d = fock_dimension(photons, modes);
    const Count d_lower = fock_dimension(photons - 1, modes);
    const Count needed = checked_mul(d, d) - checked_mul(d_lower, d_lower);
    return fock_dimension(photons, measured_modes - 1) >= needed;
}

int min_modes_lower_bound(int photons, int modes) {
    require(photons >= 1, "min_modes_lower_bound: need N >= 1");
    require(modes >= 2, "min_modes_lower_bound: need M >= 2");
    // D_{N,M'-1} is strictly increasing in M' for N >= 1, so this terminates
    // (or overflows loudly).
    for (int mp = modes;; ++mp) {
        if (single_config_feasible(photons, modes, mp)) return mp;
    }
}

} // namespace lotomo
