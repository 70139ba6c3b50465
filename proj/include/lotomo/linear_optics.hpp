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

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lotomo/fock_basis.hpp"
#include "lotomo/types.hpp"

namespace lotomo {

enum class ConfigSource { haar, mesh, newton_young, explicit_matrix };

std::string_view to_string(ConfigSource source);
ConfigSource config_source_from_string(std::string_view name);

/// Where a configuration came from. Only the fields relevant to `source`
/// are meaningful: seed for haar/mesh, index and theta for newton_young.
struct Provenance {
    ConfigSource source = ConfigSource::explicit_matrix;
    std::uint64_t seed = 0;
    int index = 0;
    double theta = 0.0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// max |g^dagger g - I| entry.
double unitarity_residual(const CMatrix& g);

/// A mode transformation g of an M'-mode interferometer. Unitarity is
/// checked on construction.
class InterferometerConfig {
public:
    static constexpr double kUnitarityTolerance = 1e-12;

    explicit InterferometerConfig(CMatrix matrix, Provenance provenance = {});

    int modes() const { return static_cast<int>(matrix_.rows()); }
    const CMatrix& matrix() const { return matrix_; }
    const Provenance& provenance() const { return provenance_; }

private:
    CMatrix matrix_;
    Provenance provenance_;
};

/// Haar-distributed unitary: complex Ginibre matrix, QR, and the phases of
/// diag(R) moved into Q.
InterferometerConfig haar_random_unitary(int modes, std::uint64_t seed);

/// One two-mode block of a rectangular mesh acting on modes (top, top+1):
/// [[e^{i phase} sqrt(t), -sqrt(1-t)], [e^{i phase} sqrt(1-t), sqrt(t)]].
struct MeshBlock {
    int top = 0;
    double transmissivity = 1.0;
    double phase = 0.0;
};

struct MeshParameters {
    int modes = 0;
    std::vector<MeshBlock> blocks;     ///< applied in order (first acts first)
    std::vector<double> output_phases; ///< one per mode, applied last
};

/// Block positions of the rectangular universal layout: M' columns of
/// alternating nearest-neighbour pairs, C(M', 2) blocks in total. All blocks
/// start as identities and all output phases as zero.
MeshParameters rectangular_mesh_layout(int modes);

CMatrix mesh_matrix(const MeshParameters& mesh);

/// Rectangular mesh with transmissivities uniform on [0, 1] and phases
/// uniform on [0, 2 pi).
InterferometerConfig random_mesh_unitary(int modes, std::uint64_t seed);

/// Appends vacuum modes so the occupation spans `modes` modes.
Occupation pad_with_vacuum(std::span<const int> occupation, int modes);

/// Largest matrix the permanent accepts.
inline constexpr int kMaxPermanentSize = 24;

/// Ryser's formula with Gray-code row-sum updates, evaluated by the active
/// kernel variant. The 0 x 0 permanent is 1.
Complex permanent(const CMatrix& a);

/// N x N matrix built by repeating column i of g `column_counts[i]` times and
/// row j `row_counts[j]` times, both in ascending mode order.
CMatrix build_submatrix(const CMatrix& g, std::span<const int> column_counts,
                        std::span<const int> row_counts);

/// <out|U(g)|in>, the N-photon transition amplitude. For one photon this is
/// g(i, j) for out = e_i, in = e_j.
Complex fock_amplitude(const CMatrix& g, std::span<const int> out, std::span<const int> in);

/// The Fock-space representation of g at a fixed photon number.
struct FockUnitary {
    FockBasis basis;
    CMatrix matrix;
};

FockUnitary lift_unitary(const CMatrix& g, int photons);

/// Rows of the lift for the given output occupations only
/// (rows.size() x D_{N,M'}), columns in canonical order.
CMatrix lift_rows(const CMatrix& g, const std::vector<Occupation>& rows, const FockBasis& columns);

} // namespace lotomo
