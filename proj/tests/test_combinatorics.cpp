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

#include <doctest.h>

#include "lotomo/combinatorics.hpp"
#include "lotomo/fock_basis.hpp"

using namespace lotomo;

namespace {

// Rational ceiling a * b / c in 128-bit arithmetic.
Count ceil_ratio(Count a, Count b, Count c) {
    const unsigned __int128 num = static_cast<unsigned __int128>(a) * b;
    return static_cast<Count>((num + c - 1) / c);
}

Count dim_by_enumeration(int n, int m) { return FockBasis(n, m).size(); }

} // namespace

TEST_CASE("fock_dimension") {
    for (int m = 1; m <= 6; ++m) {
        CHECK(fock_dimension(0, m) == 1);
        CHECK(fock_dimension(1, m) == static_cast<Count>(m));
    }
    CHECK(fock_dimension(2, 3) == 6);
    for (int n = 0; n <= 6; ++n)
        for (int m = 1; m <= 5; ++m) CHECK(fock_dimension(n, m) == dim_by_enumeration(n, m));
    CHECK_THROWS_AS(fock_dimension(1, 0), ValidationError);
    CHECK(fock_dimension(32, 32) == binomial(63, 32));
    CHECK_THROWS_AS(fock_dimension(100, 100), OverflowError);
}

TEST_CASE("min_configs") {
    for (int n = 1; n <= 10; ++n) CHECK(min_configs(n, 2) == static_cast<Count>(2 * n + 1));
    CHECK(min_configs(2, 3) == 9);
    CHECK(min_configs(1, 2) == 3);
    // (D^2 - D'^2) / D_{N,M-1} with D' = D_{N-1,M}, evaluated from enumerated dimensions.
    for (int n = 1; n <= 6; ++n) {
        for (int m = 2; m <= 6; ++m) {
            const Count d = dim_by_enumeration(n, m);
            const Count d_prev = dim_by_enumeration(n - 1, m);
            const Count per_config = dim_by_enumeration(n, m - 1);
            CHECK((d * d - d_prev * d_prev) % per_config == 0);
            CHECK(min_configs(n, m) == (d * d - d_prev * d_prev) / per_config);
        }
    }
}

TEST_CASE("min_configs_extended") {
    CHECK(min_configs_extended(2, 2, 4) == 1);
    CHECK(min_configs_extended(2, 3, 4) == 5);
    for (int n = 1; n <= 6; ++n) {
        for (int m = 2; m <= 8; ++m) {
            CHECK(min_configs_extended(n, m, m) == min_configs(n, m));
            Count previous = min_configs(n, m);
            for (int mp = m; mp <= 8; ++mp) {
                const Count r = min_configs_extended(n, m, mp);
                CHECK(r == min_configs_extended_dimension_ratio(n, m, mp));
                CHECK(r == ceil_ratio(min_configs(n, m), dim_by_enumeration(n, m - 1), dim_by_enumeration(n, mp - 1)));
                CHECK(r <= previous);
                previous = r;
                if (mp > m) {
                    CHECK(r < fock_dimension(n, m) + 1);
                    CHECK(fock_dimension(n, m) + 1 <= min_configs(n, m));
                }
            }
        }
    }
}

TEST_CASE("identity suite") {
    for (int m = 2; m <= 6; ++m) {
        for (int n = 1; n <= 8; ++n) {
            const Count d = fock_dimension(n, m);
            const Count d_prev = fock_dimension(n - 1, m);

            Count sum = 0;
            for (int l = 0; l <= n; ++l) {
                const Count z = zero_weight_dim(l, m);
                CHECK(z == binomial(static_cast<std::uint64_t>(l + m - 2), static_cast<std::uint64_t>(l)));
                sum += z;
            }
            CHECK(sum == d);

            std::vector<int> parts(static_cast<std::size_t>(m), 0);
            parts.front() = n;
            parts.back() = -n;
            const Count w = weyl_dimension(Signature(parts));
            CHECK(w == d * d - d_prev * d_prev);
            CHECK(w == min_configs(n, m) * fock_dimension(n, m - 1));

            Count telescoped = 0;
            for (int r = 1; r <= n; ++r) {
                const Count a = fock_dimension(r, m);
                const Count b = fock_dimension(r - 1, m);
                telescoped += a * a - b * b;
            }
            CHECK(telescoped == d * d - 1);
        }
    }
}

TEST_CASE("zero_weight_dim") {
    for (int l = 0; l <= 6; ++l) {
        CHECK(zero_weight_dim(l, 2) == 1);
        CHECK(zero_weight_dim(l, 3) == static_cast<Count>(l + 1));
    }
    CHECK(zero_weight_dim(2, 3) == 3);
}

TEST_CASE("weyl_dimension") {
    for (int n = 0; n <= 5; ++n)
        for (int m = 1; m <= 5; ++m) {
            std::vector<int> parts(static_cast<std::size_t>(m), 0);
            parts.front() = n;
            CHECK(weyl_dimension(Signature(parts)) == fock_dimension(n, m));
        }
    for (int l = 0; l <= 6; ++l) CHECK(weyl_dimension(Signature({l, -l})) == static_cast<Count>(2 * l + 1));
    CHECK(weyl_dimension(Signature({2, 0, -2})) == 27);
    CHECK_THROWS_AS(Signature({0, 1}), ValidationError);
}

TEST_CASE("enumerate_balanced_signatures") {
    CHECK(enumerate_balanced_signatures(2, 1) == std::vector<Signature>{Signature({0, 0}), Signature({1, -1})});
    CHECK(enumerate_balanced_signatures(2, 2) ==
          std::vector<Signature>{Signature({0, 0}), Signature({1, -1}), Signature({2, -2})});
    CHECK(enumerate_balanced_signatures(4, 0) == std::vector<Signature>{Signature({0, 0, 0, 0})});
    for (const auto& s : enumerate_balanced_signatures(4, 3)) {
        int total = 0;
        for (int x : s.parts()) total += x;
        CHECK(total == 0);
        CHECK(s.positive_weight() <= 3);
    }
}

TEST_CASE("design_size_bounds") {
    const auto b21 = design_size_bounds(2, 1);
    CHECK(b21.lower == 10);
    CHECK(b21.theorem1_bound == 16);
    CHECK(design_size_bounds(2, 2).upper == 165);
    for (int m = 2; m <= 4; ++m)
        for (int n = 1; n <= 3; ++n) {
            const auto b = design_size_bounds(m, n);
            const Count d2n = fock_dimension(2 * n, m * m);
            CHECK(b.lower <= b.upper);
            CHECK(b.upper <= d2n * d2n);
            CHECK(b.lower <= b.theorem1_bound);
        }
}

TEST_CASE("single_config_feasible and min_modes_lower_bound") {
    CHECK(single_config_feasible(2, 2, 4));
    CHECK_FALSE(single_config_feasible(2, 2, 3));
    CHECK_FALSE(single_config_feasible(1, 2, 2));
    CHECK(single_config_feasible(1, 2, 4));
    CHECK(min_modes_lower_bound(2, 2) == 4);
    CHECK(min_modes_lower_bound(1, 2) == 4);
    for (int n = 1; n <= 6; ++n)
        for (int m = 2; m <= 4; ++m) {
            const int lb = min_modes_lower_bound(n, m);
            CHECK(single_config_feasible(n, m, lb));
            if (lb > m) CHECK_FALSE(single_config_feasible(n, m, lb - 1));
        }
    // Large N: the exponent count gives M' >= 2M - 1, and the factorial
    // prefactors of the exact inequality push the bound to 2M.
    for (int m = 2; m <= 4; ++m) {
        CHECK(min_modes_lower_bound(200, m) == 2 * m);
        CHECK(min_modes_lower_bound(400, m) == 2 * m);
    }
}
