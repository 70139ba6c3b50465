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

#include "lotomo/linear_optics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lotomo/kernels/kernels.hpp"
#include "lotomo/random.hpp"

namespace lotomo {

std::string_view to_string(ConfigSource source) {
    switch (source) {
    case ConfigSource::haar: return "haar";
    case ConfigSource::mesh: return "mesh";
    case ConfigSource::newton_young: return "newton_young";
    case ConfigSource::explicit_matrix: return "explicit";
    }
    return "explicit";
}

ConfigSource config_source_from_string(std::string_view name) {
    if (name == "haar") return ConfigSource::haar;
    if (name == "mesh") return ConfigSource::mesh;
    if (name == "newton_young" || name == "newton-young") return ConfigSource::newton_young;
    if (name == "explicit") return ConfigSource::explicit_matrix;
    throw ValidationError("unknown configuration source '" + std::string(name) + "'");
}

double unitarity_residual(const CMatrix& g) {
    const CMatrix d = g.adjoint() * g - CMatrix::Identity(g.rows(), g.cols());
    return d.cwiseAbs().maxCoeff();
}

InterferometerConfig::InterferometerConfig(CMatrix matrix, Provenance provenance)
    : matrix_(std::move(matrix)), provenance_(provenance) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
        throw ValidationError("InterferometerConfig: matrix must be square and non-empty");
    }
    const double r = unitarity_residual(matrix_);
    if (!(r <= kUnitarityTolerance)) {
        throw ValidationError("InterferometerConfig: matrix is not unitary (residual " + std::to_string(r) + ")");
    }
}

InterferometerConfig haar_random_unitary(int modes, std::uint64_t seed) {
    if (modes < 1) throw ValidationError("haar_random_unitary: need at least one mode");
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix z(modes, modes);
    // Column-major fill keeps the draw order fixed.
    for (int j = 0; j < modes; ++j) {
        for (int i = 0; i < modes; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(i, j) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ() * CMatrix::Identity(modes, modes);
    const CMatrix& r = qr.matrixQR();
    for (int j = 0; j < modes; ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        q.col(j) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
    }
    return InterferometerConfig(std::move(q), Provenance{ConfigSource::haar, seed, 0, 0.0});
}

MeshParameters rectangular_mesh_layout(int modes) {
    if (modes < 1) throw ValidationError("rectangular_mesh_layout: need at least one mode");
    MeshParameters mesh;
    mesh.modes = modes;
    for (int layer = 0; layer < modes; ++layer) {
        for (int k = layer % 2; k + 1 < modes; k += 2) {
            mesh.blocks.push_back(MeshBlock{k, 1.0, 0.0});
        }
    }
    mesh.output_phases.assign(static_cast<std::size_t>(modes), 0.0);
    return mesh;
}

CMatrix mesh_matrix(const MeshParameters& mesh) {
    const int m = mesh.modes;
    if (static_cast<int>(mesh.output_phases.size()) != m) {
        throw ValidationError("mesh_matrix: need one output phase per mode");
    }
    CMatrix g = CMatrix::Identity(m, m);
    for (const auto& b : mesh.blocks) {
        if (b.top < 0 || b.top + 1 >= m) throw ValidationError("mesh_matrix: block outside the mesh");
        if (!(b.transmissivity >= 0.0 && b.transmissivity <= 1.0)) {
            throw ValidationError("mesh_matrix: transmissivity must lie in [0, 1]");
        }
        const double c = std::sqrt(b.transmissivity);
        const double s = std::sqrt(1.0 - b.transmissivity);
        const Complex e = std::polar(1.0, b.phase);
        // Left-multiply by the block: only rows top and top+1 change.
        const Eigen::RowVectorXcd r0 = g.row(b.top);
        const Eigen::RowVectorXcd r1 = g.row(b.top + 1);
        g.row(b.top) = e * c * r0 - s * r1;
        g.row(b.top + 1) = e * s * r0 + c * r1;
    }
    for (int k = 0; k < m; ++k) {
        g.row(k) *= std::polar(1.0, mesh.output_phases[static_cast<std::size_t>(k)]);
    }
    return g;
}

InterferometerConfig random_mesh_unitary(int modes, std::uint64_t seed) {
    MeshParameters mesh = rectangular_mesh_layout(modes);
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (auto& b : mesh.blocks) {
        b.transmissivity = unit(rng);
        b.phase = angle(rng);
    }
    for (auto& p : mesh.output_phases) p = angle(rng);
    return InterferometerConfig(mesh_matrix(mesh), Provenance{ConfigSource::mesh, seed, 0, 0.0});
}

Occupation pad_with_vacuum(std::span<const int> occupation, int modes) {
    if (modes < static_cast<int>(occupation.size())) {
        throw ValidationError("pad_with_vacuum: target mode count is smaller than the state");
    }
    Occupation out(occupation.begin(), occupation.end());
    out.resize(static_cast<std::size_t>(modes), 0);
    return out;
}

Complex permanent(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("permanent: matrix must be square");
    const auto n = static_cast<std::size_t>(a.rows());
    if (n == 0) return {1.0, 0.0};
    if (n > static_cast<std::size_t>(kMaxPermanentSize)) {
        throw ValidationError("permanent: size " + std::to_string(n) + " exceeds the supported maximum " +
                              std::to_string(kMaxPermanentSize));
    }
    const std::size_t stride = kernels::padded_rows(n);
    std::vector<double> re(n * stride, 0.0), im(n * stride, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const Complex v = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            re[j * stride + i] = v.real();
            im[j * stride + i] = v.imag();
        }
    }
    return kernels::active().ryser(re, im, n, stride);
}

namespace {

void check_occupation(std::span<const int> occ, int modes, const char* what) {
    if (static_cast<int>(occ.size()) != modes) {
        throw ValidationError(std::string(what) + ": occupation length does not match the mode count");
    }
    for (int v : occ) {
        if (v < 0) throw ValidationError(std::string(what) + ": negative occupation");
    }
}

std::vector<Eigen::Index> repeated_indices(std::span<const int> counts) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (int c = 0; c < counts[i]; ++c) idx.push_back(static_cast<Eigen::Index>(i));
    }
    return idx;
}

} // namespace

CMatrix build_submatrix(const CMatrix& g, std::span<const int> column_counts, std::span<const int> row_counts) {
    const int m = static_cast<int>(g.rows());
    check_occupation(column_counts, m, "build_submatrix");
    check_occupation(row_counts, m, "build_submatrix");
    if (total_photons(column_counts) != total_photons(row_counts)) {
        throw ValidationError("build_submatrix: photon numbers differ");
    }
    const auto rows = repeated_indices(row_counts);
    const auto cols = repeated_indices(column_counts);
    const auto n = static_cast<Eigen::Index>(rows.size());
    CMatrix out(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) out(r, c) = g(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
    }
    return out;
}

Complex fock_amplitude(const CMatrix& g, std::span<const int> out, std::span<const int> in) {
    // Rows follow the output occupation, columns the input one.
    const CMatrix sub = build_submatrix(g, in, out);
    return permanent(sub) / std::sqrt(occupation_factorial(out) * occupation_factorial(in));
}

CMatrix lift_rows(const CMatrix& g, const std::vector<Occupation>& rows, const FockBasis& columns) {
    if (g.rows() != g.cols() || g.rows() != columns.modes()) {
        throw ValidationError("lift_rows: mode transformation does not match the basis");
    }
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto nc = static_cast<Eigen::Index>(columns.size());
    std::vector<double> col_factorial(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        col_factorial[c] = occupation_factorial(columns.state_at(c));
    }
    CMatrix out(nr, nc);
    for (Eigen::Index r = 0; r < nr; ++r) {
        const Occupation& o = rows[static_cast<std::size_t>(r)];
        if (!columns.contains(o)) throw ValidationError("lift_rows: row occupation outside the basis");
        const double row_factorial = occupation_factorial(o);
        for (Eigen::Index c = 0; c < nc; ++c) {
            const Occupation& in = columns.state_at(static_cast<std::size_t>(c));
            const double norm = std::sqrt(row_factorial * col_factorial[static_cast<std::size_t>(c)]);
            out(r, c) = permanent(build_submatrix(g, in, o)) / norm;
        }
    }
    return out;
}

FockUnitary lift_unitary(const CMatrix& g, int photons) {
    if (g.rows() != g.cols() || g.rows() == 0) throw ValidationError("lift_unitary: g must be square");
    FockBasis basis(photons, static_cast<int>(g.rows()));
    CMatrix u = lift_rows(g, basis.states(), basis);
    return FockUnitary{std::move(basis), std::move(u)};
}

} // namespace lotomo
