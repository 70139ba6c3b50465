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

#include <immintrin.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>

#include "lotomo/kernels/kernels.hpp"
#include "accumulate.hpp"

namespace lotomo::kernels {

namespace {

using detail::CompensatedSum;
using detail::PlainSum;

// Product of all row sums, four rows per lane group, then a horizontal
// complex product across lanes.
inline Complex lane_product(const double* xr, const double* xi, std::size_t stride) {
    __m256d pr = _mm256_set1_pd(1.0);
    __m256d pi = _mm256_setzero_pd();
    for (std::size_t i = 0; i < stride; i += 4) {
        const __m256d r = _mm256_load_pd(xr + i);
        const __m256d m = _mm256_load_pd(xi + i);
        const __m256d nr = _mm256_fmsub_pd(pr, r, _mm256_mul_pd(pi, m));
        pi = _mm256_fmadd_pd(pr, m, _mm256_mul_pd(pi, r));
        pr = nr;
    }
    alignas(32) double lr[4];
    alignas(32) double li[4];
    _mm256_store_pd(lr, pr);
    _mm256_store_pd(li, pi);
    double cr = lr[0], ci = li[0];
    for (int l = 1; l < 4; ++l) {
        const double t = cr * lr[l] - ci * li[l];
        ci = cr * li[l] + ci * lr[l];
        cr = t;
    }
    return {cr, ci};
}

template <class Acc>
Complex ryser_avx2_impl(std::span<const double> re, std::span<const double> im, std::size_t n,
                        std::size_t stride) {
    // stride <= 64 always: the subset loop already limits n to 63.
    alignas(32) std::array<double, 64> xr_buf;
    alignas(32) std::array<double, 64> xi_buf;
    double* xr = xr_buf.data();
    double* xi = xi_buf.data();

    for (std::size_t i = 0; i < stride; ++i) {
        if (i >= n) {
            // Padding rows stay at 1 + 0i so the product is unaffected.
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
        const __m256d s = _mm256_set1_pd((gray >> j & 1U) ? 1.0 : -1.0);
        const double* cr = re.data() + j * stride;
        const double* ci = im.data() + j * stride;
        for (std::size_t i = 0; i < stride; i += 4) {
            _mm256_store_pd(xr + i, _mm256_fmadd_pd(s, _mm256_loadu_pd(cr + i), _mm256_load_pd(xr + i)));
            _mm256_store_pd(xi + i, _mm256_fmadd_pd(s, _mm256_loadu_pd(ci + i), _mm256_load_pd(xi + i)));
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

Complex ryser_avx2(std::span<const double> re, std::span<const double> im, std::size_t n,
                   std::size_t stride) {
    if (n == 0) return {1.0, 0.0};
    if (n >= detail::kCompensateFrom) return ryser_avx2_impl<CompensatedSum>(re, im, n, stride);
    return ryser_avx2_impl<PlainSum>(re, im, n, stride);
}

void conj_outer_avx2(std::span<const Complex> v, std::span<Complex> out) {
    const std::size_t n = v.size();
    const auto* src = reinterpret_cast<const double*>(v.data());
    auto* dst = reinterpret_cast<double*>(out.data());
    const std::size_t pairs = n / 2;
    for (std::size_t a = 0; a < n; ++a) {
        const double ar = src[2 * a];
        const double ai = src[2 * a + 1];
        const __m256d var = _mm256_set1_pd(ar);
        const __m256d nai = _mm256_set1_pd(-ai);
        double* row = dst + 2 * a * n;
        for (std::size_t b = 0; b < pairs; ++b) {
            // [br0, bi0, br1, bi1]
            const __m256d vb = _mm256_loadu_pd(src + 4 * b);
            const __m256d swapped = _mm256_permute_pd(vb, 0b0101);
            // even lanes: ar*br + ai*bi, odd lanes: ar*bi - ai*br
            const __m256d res = _mm256_fmaddsub_pd(var, vb, _mm256_mul_pd(nai, swapped));
            _mm256_storeu_pd(row + 4 * b, res);
        }
        if (n & 1U) {
            const std::size_t b = n - 1;
            const double br = src[2 * b];
            const double bi = src[2 * b + 1];
            row[2 * b] = ar * br + ai * bi;
            row[2 * b + 1] = ar * bi - ai * br;
        }
    }
}

} // namespace lotomo::kernels
