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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lotomo/combinatorics.hpp"
#include "lotomo/fock_basis.hpp"
#include "lotomo/linear_optics.hpp"
#include "lotomo/types.hpp"

namespace lotomo {

using RowMajorCMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Hermitian, unit-trace, positive semidefinite operator on an N-photon
/// Fock space.
class DensityMatrix {
public:
    static constexpr double kHermitianTolerance = 1e-12;
    static constexpr double kTraceTolerance = 1e-12;
    static constexpr double kEigenvalueFloor = -1e-10;

    DensityMatrix(FockBasis basis, CMatrix matrix);

    const FockBasis& basis() const { return basis_; }
    const CMatrix& matrix() const { return matrix_; }
    int photons() const { return basis_.photons(); }
    int modes() const { return basis_.modes(); }
    std::size_t dim() const { return basis_.size(); }

private:
    FockBasis basis_;
    CMatrix matrix_;
};

/// Half the trace norm of the Hermitian part of a - b.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// Ginibre-distributed random state; rank 0 means full rank.
DensityMatrix random_density_matrix(int photons, int modes, std::uint64_t seed, int rank = 0);
DensityMatrix fock_projector(const FockBasis& basis, std::span<const int> occupation);
DensityMatrix maximally_mixed(const FockBasis& basis);
DensityMatrix pure_state(const FockBasis& basis, const CVector& amplitudes);

/// Hermitizes, clips negative eigenvalues and renormalizes the trace.
DensityMatrix project_to_density_matrix(const FockBasis& basis, const CMatrix& estimate);

/// Outcome distribution diag(U^dagger rho U) over the N-photon basis of the
/// configuration's modes, with rho padded by vacuum modes. Round-off
/// negatives down to -1e-12 are left in place; anything lower is an error.
RVector outcome_probabilities(const DensityMatrix& rho, const InterferometerConfig& config);

/// Row-major flattening: entry (a, b) lands at a * D + b, matching the
/// column order of the superoperator.
CVector flatten(const CMatrix& rho);
CMatrix unflatten(const CVector& flat, std::size_t dim);

/// Linear map from density-matrix entries to outcome probabilities. Row
/// (j, nu) sits at j * D_{N,M'} + nu; column (a, b) at a * D_{N,M} + b.
struct Superoperator {
    FockBasis input_basis;
    FockBasis output_basis;
    std::size_t config_count = 0;
    RowMajorCMatrix matrix;

    std::size_t outcomes_per_config() const { return output_basis.size(); }
};

Superoperator build_superoperator(std::span<const InterferometerConfig> configs, int photons, int modes);

struct RankOptions {
    /// Overrides the default relative threshold max(rows, cols) * eps.
    std::optional<double> relative_tolerance;
};

struct RankReport {
    std::size_t rank = 0;
    std::size_t full_rank = 0; ///< D_{N,M}^2
    double sigma_max = 0.0;
    double smallest_retained = 0.0;
    double largest_discarded = 0.0;
    double tolerance = 0.0;

    bool complete() const { return rank == full_rank; }
};

RankReport gramian_rank(const Superoperator& l, const RankOptions& options = {});

bool is_complete(std::span<const InterferometerConfig> configs, int photons, int modes,
                 const RankOptions& options = {});

/// Data collected for one configuration: exact probabilities or counts.
struct MeasurementRecord {
    std::size_t config_index = 0;
    RVector probabilities;               ///< exact mode
    std::vector<std::uint64_t> counts;   ///< sampled mode
    std::uint64_t shots = 0;

    bool sampled() const { return !counts.empty(); }
    /// Probabilities, or counts / shots.
    RVector frequencies() const;

    static MeasurementRecord exact(std::size_t config_index, RVector probabilities);
    static MeasurementRecord from_counts(std::size_t config_index, std::vector<std::uint64_t> counts);
};

class RankDeficientError : public NumericalError {
public:
    RankDeficientError(std::size_t rank, std::size_t required);
    std::size_t rank() const { return rank_; }
    std::size_t required() const { return required_; }
    std::size_t deficit() const { return required_ - rank_; }

private:
    std::size_t rank_;
    std::size_t required_;
};

struct Reconstruction {
    CMatrix raw;              ///< minimum-norm least-squares estimate, untouched
    DensityMatrix projected;  ///< raw estimate mapped onto valid states
    double residual = 0.0;    ///< || L raw - p ||_2
    RankReport rank;
};

/// Least-squares inversion via SVD; throws RankDeficientError when the
/// configurations are not tomographically complete.
Reconstruction reconstruct(const Superoperator& l, std::span<const MeasurementRecord> records,
                           const RankOptions& options = {});

enum class Generator { haar, mesh };

std::string_view to_string(Generator g);
Generator generator_from_string(std::string_view name);

InterferometerConfig generate_config(Generator generator, int modes, std::uint64_t seed);

/// Configuration j of a run seeded with `seed` (independent stream per j).
InterferometerConfig generate_config_in_run(Generator generator, int modes, std::uint64_t seed,
                                            std::size_t j);

struct MinConfigsResult {
    int photons = 0;
    int modes = 0;
    int measured_modes = 0;
    Generator generator = Generator::haar;
    std::uint64_t seed = 0;
    bool found = false;
    std::size_t configs_used = 0;         ///< minimal R when found, r_max otherwise
    std::vector<std::size_t> rank_trace;  ///< rank after 1, 2, ... configs
    std::size_t full_rank = 0;
    std::size_t best_rank = 0;
    Count lower_bound = 0;                ///< R_{N,M,M'}
    std::vector<InterferometerConfig> configs;

    /// Observed R minus the counting bound (0 when they coincide).
    long long gap() const {
        return static_cast<long long>(configs_used) - static_cast<long long>(lower_bound);
    }
};

/// Appends one fresh configuration at a time until the superoperator reaches
/// full rank or r_max configurations have been tried.
MinConfigsResult find_min_configs(int photons, int modes, int measured_modes, Generator generator,
                                  std::uint64_t seed, std::size_t r_max, const RankOptions& options = {});

struct MinModesResult {
    int photons = 0;
    int modes = 0;
    bool found = false;
    int measured_modes = 0;  ///< first M' whose single configuration is complete
    int lower_bound = 0;     ///< min_modes_lower_bound(N, M)
    std::vector<std::pair<int, std::size_t>> trace; ///< (M', rank) per attempt
};

/// Scans M' upward from M testing one generated configuration per value.
MinModesResult find_min_modes(int photons, int modes, Generator generator, std::uint64_t seed,
                              int max_modes, const RankOptions& options = {});

/// Multinomial draw of `shots` outcomes from p.
std::vector<std::uint64_t> sample_shots(const RVector& p, std::uint64_t shots, std::uint64_t seed);

/// One record per configuration, exact when shots == 0.
std::vector<MeasurementRecord> simulate_records(const DensityMatrix& rho,
                                                std::span<const InterferometerConfig> configs,
                                                std::uint64_t shots, std::uint64_t seed);

} // namespace lotomo
