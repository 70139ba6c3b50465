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

#include <bit>
#include <cmath>
#include <cstdint>

#include "lotomo/kernels/kernels.hpp"
#include "accumulate.hpp"

namespace lotomo::kernels {

namespace {

using detail::CompensatedSum;
using detail::PlainSum;

template <class Acc>
Complex ryser_scalar_impl(std::span<const double> re, std::span<const double> im, std::size_t n,
                          std::size_t stride) {
    std::vector<double> xr(n), xi(n);
    // Nijenhuis-Wilf start: x_i = a_{i,n-1} - sum_j a_{ij} / 2.
    for (std::size_t i = 0; i < n; ++i) {
        double sr = 0.0, si = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            sr += re[j * stride + i];
            si += im[j * stride + i];
        }
        xr[i] = re[(n - 1) * stride + i] - 0.5 * sr;
        xi[i] = im[(n - 1) * stride + i] - 0.5 * si;
    }

    auto row_product = [&] {
        double pr = 1.0, pi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = pr * xr[i] - pi * xi[i];
            pi = pr * xi[i] + pi * xr[i];
            pr = r;
        }
        return Complex(pr, pi);
    };

    Acc acc_re, acc_im;
    Complex p = row_product();
    acc_re.add(p.real());
    acc_im.add(p.imag());

    const std::uint64_t subsets = std::uint64_t{1} << (n - 1);
    std::uint64_t gray = 0;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        const auto j = static_cast<std::size_t>(std::countr_zero(k));
        gray ^= std::uint64_t{1} << j;
        const double s = (gray >> j & 1U) ? 1.0 : -1.0;
        const double* cr = re.data() + j * stride;
        const double* ci = im.data() + j * stride;
        for (std::size_t i = 0; i < n; ++i) {
            xr[i] += s * cr[i];
            xi[i] += s * ci[i];
        }
        p = row_product();
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

Complex ryser_scalar(std::span<const double> re, std::span<const double> im, std::size_t n,
                     std::size_t stride) {
    if (n == 0) return {1.0, 0.0};
    if (n >= detail::kCompensateFrom) return ryser_scalar_impl<CompensatedSum>(re, im, n, stride);
    return ryser_scalar_impl<PlainSum>(re, im, n, stride);
}

void conj_outer_scalar(std::span<const Complex> v, std::span<Complex> out) {
    const std::size_t n = v.size();
    for (std::size_t a = 0; a < n; ++a) {
        const double ar = v[a].real();
        const double ai = v[a].imag();
        for (std::size_t b = 0; b < n; ++b) {
            const double br = v[b].real();
            const double bi = v[b].imag();
            out[a * n + b] = Complex(ar * br + ai * bi, ar * bi - ai * br);
        }
    }
}

} // namespace lotomo::kernels
