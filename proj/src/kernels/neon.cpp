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

#include <arm_neon.h>

#include <array>
#include <bit>
#include <cstdint>

#include "lotomo/kernels/kernels.hpp"
#include "accumulate.hpp"

namespace lotomo::kernels {

namespace {

using detail::CompensatedSum;
using detail::PlainSum;

inline Complex lane_product(const double* xr, const double* xi, std::size_t stride) {
    float64x2_t pr = vdupq_n_f64(1.0);
    float64x2_t pi = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < stride; i += 2) {
        const float64x2_t r = vld1q_f64(xr + i);
        const float64x2_t m = vld1q_f64(xi + i);
        const float64x2_t nr = vfmsq_f64(vmulq_f64(pr, r), pi, m);
        pi = vfmaq_f64(vmulq_f64(pi, r), pr, m);
        pr = nr;
    }
    const double r0 = vgetq_lane_f64(pr, 0), r1 = vgetq_lane_f64(pr, 1);
    const double i0 = vgetq_lane_f64(pi, 0), i1 = vgetq_lane_f64(pi, 1);
    return {r0 * r1 - i0 * i1, r0 * i1 + i0 * r1};
}

template <class Acc>
Complex ryser_neon_impl(std::span<const double> re, std::span<const double> im, std::size_t n,
                        std::size_t stride) {
    alignas(16) std::array<double, 64> xr_buf;
    alignas(16) std::array<double, 64> xi_buf;
    double* xr = xr_buf.data();
    double* xi = xi_buf.data();

    for (std::size_t i = 0; i < stride; ++i) {
        if (i >= n) {
            xr[i] = 1.0;
            xi[i] = 0.0;
            continue;
        }
        double sr = 0.0, si = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            sr += re[j * stride + i];
            si += im[j * stride + i];
        }
        xr[i] = re[(n - 1) * stride + i] - 0.5 * sr;
        xi[i] = im[(n - 1) * stride + i] - 0.5 * si;
    }

    Acc acc_re, acc_im;
    Complex p = lane_product(xr, xi, stride);
    acc_re.add(p.real());
    acc_im.add(p.imag());

    const std::uint64_t subsets = std::uint64_t{1} << (n - 1);
    std::uint64_t gray = 0;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        const auto j = static_cast<std::size_t>(std::countr_zero(k));
        gray ^= std::uint64_t{1} << j;
        const float64x2_t s = vdupq_n_f64((gray >> j & 1U) ? 1.0 : -1.0);
        const double* cr = re.data() + j * stride;
        const double* ci = im.data() + j * stride;
        for (std::size_t i = 0; i < stride; i += 2) {
            vst1q_f64(xr + i, vfmaq_f64(vld1q_f64(xr + i), s, vld1q_f64(cr + i)));
            vst1q_f64(xi + i, vfmaq_f64(vld1q_f64(xi + i), s, vld1q_f64(ci + i)));
        }
        p = lane_product(xr, xi, stride);
        if (k & 1U) {
            acc_re.add(-p.real());
            acc_im.add(-p.imag());
        } else {
            acc_re.add(p.real());
            acc_im.add(p.imag());
        }
    }
    const double scale = (n & 1U) ? 2.0 : -2.0;
    return scale * Complex(acc_re.value(), acc_im.value());
}

} // namespace

Complex ryser_neon(std::span<const double> re, std::span<const double> im, std::size_t n,
                   std::size_t stride) {
    if (n == 0) return {1.0, 0.0};
    if (n >= detail::kCompensateFrom) return ryser_neon_impl<CompensatedSum>(re, im, n, stride);
    return ryser_neon_impl<PlainSum>(re, im, n, stride);
}

void conj_outer_neon(std::span<const Complex> v, std::span<Complex> out) {
    const std::size_t n = v.size();
    const auto* src = reinterpret_cast<const double*>(v.data());
    auto* dst = reinterpret_cast<double*>(out.data());
    // One complex number per register: [re, im].
    const float64x2_t flip = {1.0, -1.0};
    for (std::size_t a = 0; a < n; ++a) {
        const float64x2_t ar = vdupq_n_f64(src[2 * a]);
        const float64x2_t ai = vdupq_n_f64(src[2 * a + 1]);
        double* row = dst + 2 * a * n;
        for (std::size_t b = 0; b < n; ++b) {
            const float64x2_t vb = vld1q_f64(src + 2 * b);       // [br, bi]
            const float64x2_t swapped = vextq_f64(vb, vb, 1);    // [bi, br]
            // [ar*br + ai*bi, ar*bi - ai*br]
            const float64x2_t res = vfmaq_f64(vmulq_f64(ar, vb), vmulq_f64(ai, swapped), flip);
            vst1q_f64(row + 2 * b, res);
        }
    }
}

} // namespace lotomo::kernels
