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

#include <cmath>
#include <cstddef>

namespace lotomo::kernels::detail {

// Neumaier-compensated accumulator for one real component.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }

    double value() const { return sum + carry; }
};

struct PlainSum {
    double sum = 0.0;
    void add(double v) { sum += v; }
    double value() const { return sum; }
};

// Compensation kicks in once the alternating subset sum gets long enough for
// cancellation to matter.
inline constexpr std::size_t kCompensateFrom = 12;

} // namespace lotomo::kernels::detail
