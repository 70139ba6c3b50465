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

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lotomo/combinatorics.hpp"
#include "lotomo/fock_basis.hpp"
#include "lotomo/linear_optics.hpp"
#include "lotomo/tomography.hpp"

namespace lotomo {

/// Occupation vectors over M modes with total photon number 0..N_max,
/// grouped by total (ascending) and in canonical order inside each group.
class TruncatedBasis {
public:
    TruncatedBasis(int modes, int max_photons);

    int modes() const { return modes_; }
    int max_photons() const { return max_photons_; }
    std::size_t size() const { return states_.size(); }
    const Occupation& state_at(std::size_t i) const { return states_.at(i); }
    const std::vector<Occupation>& states() const { return states_; }
    std::size_t index_of(std::span<const int> occupation) const;

    /// [offset, offset + count) of the states with `photons` in total.
    std::pair<std::size_t, std::size_t> sector(int photons) const;

private:
    int modes_;
    int max_photons_;
    std::vector<Occupation> states_;
    std::vector<std::size_t> offsets_; // size max_photons + 2
};

struct MixtureComponent {
    double weight = 0.0;
    DensityMatrix state;
};

/// Source emitting the N-photon state rho_N with probability pi_N.
class PhotonNumberMixture {
public:
    static constexpr double kWeightTolerance = 1e-12;

    explicit PhotonNumberMixture(std::vector<MixtureComponent> components);

    const std::vector<MixtureComponent>& components() const { return components_; }
    int modes() const { return modes_; }
    int max_photons() const;

private:
    std::vector<MixtureComponent> components_;
    int modes_ = 0;
};

/// Per-mode detection efficiencies, optionally times a uniform transmission
/// that stands in for interferometer loss.
class DetectorModel {
public:
    explicit DetectorModel(std::vector<double> efficiencies, double transmission = 1.0);
    static DetectorModel uniform(int modes, double efficiency);

    int modes() const { return static_cast<int>(efficiencies_.size()); }
    /// Effective efficiency of mode j (efficiency times transmission).
    double efficiency(int mode) const;

private:
    std::vector<double> efficiencies_;
    double transmission_;
};

struct SectorProbabilities {
    double weight = 0.0;      ///< pi_N
    RVector conditional;      ///< outcome distribution given N photons
};

/// Per-sector outcome statistics of a mixture measured with one configuration.
std::map<int, SectorProbabilities> mixture_probabilities(const PhotonNumberMixture& mix,
                                                         const InterferometerConfig& config);

/// The same statistics flattened onto the truncated outcome space.
RVector joint_distribution(const PhotonNumberMixture& mix, const InterferometerConfig& config,
                           const TruncatedBasis& outcomes);

struct PostSelection {
    RVector conditional;       ///< renormalized distribution inside the sector
    double sector_mass = 0.0;  ///< estimates pi_N (or eta^N pi_N under loss)
};

/// Keeps the outcomes with exactly `photons` detected and renormalizes.
/// Works on probabilities and on raw counts alike.
PostSelection postselect_total(const TruncatedBasis& outcomes, const RVector& values, int photons);

/// Binomial thinning P(k|n) = prod_j C(n_j, k_j) eta_j^k_j (1 - eta_j)^(n_j - k_j).
RVector detector_response(const TruncatedBasis& outcomes, const RVector& p, const DetectorModel& model);

struct DetectorInversion {
    RVector values;
    double min_value = 0.0;          ///< negatives are kept unless projected
    double missing_mass = 0.0;       ///< 1 - sum of the detected input
    bool truncation_warning = false; ///< missing_mass above 1e-9
    bool projected = false;
};

/// Undoes detector_response by back substitution on the componentwise
/// partial order (the response matrix is triangular there, diagonal
/// prod_j eta_j^k_j).
DetectorInversion invert_detector_response(const TruncatedBasis& outcomes, const RVector& detected,
                                           const DetectorModel& model, bool project = false);

/// Euclidean projection onto the probability simplex.
RVector project_to_simplex(const RVector& v);

/// max over N <= N_max of R_{N,M,M'}.
Count required_mixture_configs(int modes, int measured_modes, int max_photons);

struct MixtureEstimate {
    std::map<int, double> weights;
    std::map<int, Reconstruction> states;
};

/// Optional detector inversion, then per-sector post-selection and
/// reconstruction. Records hold distributions (or counts) over the truncated
/// outcome space, one per configuration in order.
MixtureEstimate reconstruct_mixture(std::span<const MeasurementRecord> records,
                                    std::span<const InterferometerConfig> configs, int modes, int max_photons,
                                    const std::optional<DetectorModel>& detector = std::nullopt,
                                    const RankOptions& options = {});

} // namespace lotomo
