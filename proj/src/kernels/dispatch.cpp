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

#include <atomic>
#include <string>

#include "lotomo/kernels/kernels.hpp"

namespace lotomo::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &ryser_scalar, &conj_outer_scalar};
#if defined(LOTOMO_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &ryser_avx2, &conj_outer_avx2};
#endif
#if defined(LOTOMO_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, &ryser_neon, &conj_outer_neon};
#endif

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{&table(detect_best())};
    return slot;
}

} // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    }
    return "unknown";
}

bool supported(Isa isa) {
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(LOTOMO_HAVE_AVX2)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::neon:
#if defined(LOTOMO_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

std::vector<Isa> supported_isas() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
        if (supported(isa)) out.push_back(isa);
    }
    return out;
}

Isa detect_best() {
    if (supported(Isa::avx2)) return Isa::avx2;
    if (supported(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

const KernelTable& table(Isa isa) {
    if (!supported(isa)) {
        throw ValidationError("kernel variant '" + std::string(isa_name(isa)) +
                              "' is not available on this machine");
    }
    switch (isa) {
#if defined(LOTOMO_HAVE_AVX2)
    case Isa::avx2: return kAvx2;
#endif
#if defined(LOTOMO_HAVE_NEON)
    case Isa::neon: return kNeon;
#endif
    default: return kScalar;
    }
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void select(Isa isa) { active_slot().store(&table(isa), std::memory_order_release); }

ScopedKernelTable::ScopedKernelTable(const KernelTable& replacement)
    : previous_(&active()), replacement_(replacement) {
    active_slot().store(&replacement_, std::memory_order_release);
}

ScopedKernelTable::~ScopedKernelTable() { active_slot().store(previous_, std::memory_order_release); }

} // namespace lotomo::kernels
