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

// Data-parallel inner loops with a portable scalar reference and SIMD
// variants. The active variant is chosen at first use from the host CPU and
// can be overridden (tests compare every supported variant to the scalar one).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lotomo/types.hpp"

namespace lotomo::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Row padding of split-complex matrices handed to the permanent kernels.
inline constexpr std::size_t kRowAlign = 4;

inline constexpr std::size_t padded_rows(std::size_t n) {
    return (n + kRowAlign - 1) / kRowAlign * kRowAlign;
}

/// Permanent of an n x n matrix stored column-major in split form: column j
/// occupies re[j*stride .. j*stride+stride) (same for im). Rows n..stride-1
/// must be zero and stride a multiple of kRowAlign.
using RyserFn = Complex (*)(std::span<const double> re, std::span<const double> im, std::size_t n,
                            std::size_t stride);

/// out[a*n + b] = conj(v[a]) * v[b] for a, b < n.
using ConjOuterFn = void (*)(std::span<const Complex> v, std::span<Complex> out);

struct KernelTable {
    Isa isa;
    RyserFn ryser;
    ConjOuterFn conj_outer;
};

/// Reference implementations, always available.
Complex ryser_scalar(std::span<const double> re, std::span<const double> im, std::size_t n,
                     std::size_t stride);
void conj_outer_scalar(std::span<const Complex> v, std::span<Complex> out);

#if defined(LOTOMO_HAVE_AVX2)
Complex ryser_avx2(std::span<const double> re, std::span<const double> im, std::size_t n,
                   std::size_t stride);
void conj_outer_avx2(std::span<const Complex> v, std::span<Complex> out);
#endif

#if defined(LOTOMO_HAVE_NEON)
Complex ryser_neon(std::span<const double> re, std::span<const double> im, std::size_t n,
                   std::size_t stride);
void conj_outer_neon(std::span<const Complex> v, std::span<Complex> out);
#endif

/// Whether this build contains the variant and the running CPU can execute it.
bool supported(Isa isa);

/// Every variant usable on this machine, scalar first.
std::vector<Isa> supported_isas();

/// Best variant for the host CPU.
Isa detect_best();

/// Table for a specific variant; throws ValidationError when unsupported.
const KernelTable& table(Isa isa);

/// Table used by the library.
const KernelTable& active();

/// Switch the library-wide variant.
void select(Isa isa);

/// Installs a caller-supplied table for the lifetime of the object. Used to
/// pin a variant in tests and to inject faulty kernels in mutation checks.
class ScopedKernelTable {
public:
    explicit ScopedKernelTable(const KernelTable& replacement);
    ~ScopedKernelTable();
    ScopedKernelTable(const ScopedKernelTable&) = delete;
    ScopedKernelTable& operator=(const ScopedKernelTable&) = delete;

private:
    const KernelTable* previous_;
    KernelTable replacement_;
};

} // namespace lotomo::kernels
