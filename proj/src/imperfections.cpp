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

#include "lotomo/imperfections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <string>

namespace lotomo {

TruncatedBasis::TruncatedBasis(int modes, int max_photons) : modes_(modes), max_photons_(max_photons) {
    if (modes < 1) throw ValidationError("TruncatedBasis: need at least one mode");
    if (max_photons < 0) throw ValidationError("TruncatedBasis: negative photon cap");
    offsets_.push_back(0);
    for (int n = 0; n <= max_photons; ++n) {
        FockBasis sector(n, modes);
        states_.insert(states_.end(), sector.states().begin(), sector.states().end());
        offsets_.push_back(states_.size());
    }
}

std::size_t TruncatedBasis::index_of(std::span<const int> occupation) const {
    const int total = total_photons(occupation);
    if (total < 0 || total > max_photons_) throw ValidationError("TruncatedBasis::index_of: total outside the space");
    return offsets_[static_cast<std::size_t>(total)] + FockBasis(total, modes_).index_of(occupation);
}

std::pair<std::size_t, std::size_t> TruncatedBasis::sector(int photons) const {
    if (photons < 0 || photons > max_photons_) throw ValidationError("TruncatedBasis::sector: photon number outside the space");
    const auto n = static_cast<std::size_t>(photons);
    return {offsets_[n], offsets_[n + 1] - offsets_[n]};
}

PhotonNumberMixture::PhotonNumberMixture(std::vector<MixtureComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw ValidationError("PhotonNumberMixture: no components");
    modes_ = components_.front().state.modes();
    std::set<int> seen;
    double total = 0.0;
    for (const auto& c : components_) {
        if (c.state.modes() != modes_) throw ValidationError("PhotonNumberMixture: components disagree on the mode count");
        if (!seen.insert(c.state.photons()).second) {
            throw ValidationError("PhotonNumberMixture: photon number " + std::to_string(c.state.photons()) + " appears twice");
        }
        if (!(c.weight >= 0.0)) throw ValidationError("PhotonNumberMixture: negative weight");
        total += c.weight;
    }
    if (!(std::abs(total - 1.0) <= kWeightTolerance)) {
        throw ValidationError("PhotonNumberMixture: weights sum to " + std::to_string(total));
    }
    std::sort(components_.begin(), components_.end(),
              [](const auto& a, const auto& b) { return a.state.photons() < b.state.photons(); });
}

int PhotonNumberMixture::max_photons() const { return components_.back().state.photons(); }

DetectorModel::DetectorModel(std::vector<double> efficiencies, double transmission)
    : efficiencies_(std::move(efficiencies)), transmission_(transmission) {
    if (efficiencies_.empty()) throw ValidationError("DetectorModel: no modes");
    auto in_range = [](double e) { return e > 0.0 && e <= 1.0; };
    if (!in_range(transmission_)) throw ValidationError("DetectorModel: transmission must lie in (0, 1]");
    for (double e : efficiencies_) {
        if (!in_range(e)) throw ValidationError("DetectorModel: efficiency " + std::to_string(e) + " outside (0, 1]");
    }
}

DetectorModel DetectorModel::uniform(int modes, double efficiency) {
    if (modes < 1) throw ValidationError("DetectorModel: need at least one mode");
    return DetectorModel(std::vector<double>(static_cast<std::size_t>(modes), efficiency));
}

double DetectorModel::efficiency(int mode) const { return efficiencies_.at(static_cast<std::size_t>(mode)) * transmission_; }

std::map<int, SectorProbabilities> mixture_probabilities(const PhotonNumberMixture& mix, const InterferometerConfig& config) {
    std::map<int, SectorProbabilities> out;
    for (const auto& c : mix.components()) {
        out.emplace(c.state.photons(), SectorProbabilities{c.weight, outcome_probabilities(c.state, config)});
    }
    return out;
}

RVector joint_distribution(const PhotonNumberMixture& mix, const InterferometerConfig& config, const TruncatedBasis& outcomes) {
    if (outcomes.modes() != config.modes()) throw ValidationError("joint_distribution: outcome space has the wrong mode count");
    if (outcomes.max_photons() < mix.max_photons()) throw ValidationError("joint_distribution: outcome space truncated below the source");
    RVector joint = RVector::Zero(static_cast<Eigen::Index>(outcomes.size()));
    for (const auto& [n, sector] : mixture_probabilities(mix, config)) {
        const auto [offset, count] = outcomes.sector(n);
        joint.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(count)) = sector.weight * sector.conditional;
    }
    return joint;
}

PostSelection postselect_total(const TruncatedBasis& outcomes, const RVector& values, int photons) {
    if (values.size() != static_cast<Eigen::Index>(outcomes.size())) {
        throw ValidationError("postselect_total: data length does not match the outcome space");
    }
    const auto [offset, count] = outcomes.sector(photons);
    const RVector sector = values.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(count));
    const double mass = sector.sum();
    if (!(mass > 0.0)) {
        throw NumericalError("postselect_total: sector N=" + std::to_string(photons) + " is empty");
    }
    return PostSelection{sector / mass, mass};
}

namespace {

void check_model(const TruncatedBasis& outcomes, const DetectorModel& model) {
    if (model.modes() != outcomes.modes()) throw ValidationError("detector model and outcome space disagree on the mode count");
}

double binomial_thinning(std::span<const int> n, std::span<const int> k, const DetectorModel& model) {
    double p = 1.0;
    for (std::size_t j = 0; j < n.size(); ++j) {
        const double eta = model.efficiency(static_cast<int>(j));
        p *= static_cast<double>(binomial(static_cast<std::uint64_t>(n[j]), static_cast<std::uint64_t>(k[j]))) *
             std::pow(eta, k[j]) * std::pow(1.0 - eta, n[j] - k[j]);
    }
    return p;
}

bool dominates(std::span<const int> n, std::span<const int> k) {
    for (std::size_t j = 0; j < n.size(); ++j) {
        if (n[j] < k[j]) return false;
    }
    return true;
}

// Calls f(k) for every k with 0 <= k <= n componentwise.
void for_each_below(const Occupation& n, const std::function<void(const Occupation&)>& f) {
    Occupation k(n.size(), 0);
    while (true) {
        f(k);
        std::size_t j = 0;
        while (j < k.size() && k[j] == n[j]) {
            k[j] = 0;
            ++j;
        }
        if (j == k.size()) return;
        ++k[j];
    }
}

} // namespace

RVector detector_response(const TruncatedBasis& outcomes, const RVector& p, const DetectorModel& model) {
    check_model(outcomes, model);
    if (p.size() != static_cast<Eigen::Index>(outcomes.size())) {
        throw ValidationError("detector_response: distribution length does not match the outcome space");
    }
    RVector out = RVector::Zero(p.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const double pn = p(static_cast<Eigen::Index>(i));
        if (pn == 0.0) continue;
        const Occupation& n = outcomes.state_at(i);
        for_each_below(n, [&](const Occupation& k) {
            out(static_cast<Eigen::Index>(outcomes.index_of(k))) += binomial_thinning(n, k, model) * pn;
        });
    }
    return out;
}

DetectorInversion invert_detector_response(const TruncatedBasis& outcomes, const RVector& detected,
                                           const DetectorModel& model, bool project) {
    check_model(outcomes, model);
    if (detected.size() != static_cast<Eigen::Index>(outcomes.size())) {
        throw ValidationError("invert_detector_response: distribution length does not match the outcome space");
    }
    DetectorInversion res;
    res.missing_mass = 1.0 - detected.sum();
    res.truncation_warning = res.missing_mass > 1e-9;

    RVector truth = RVector::Zero(detected.size());
    // Larger totals first: every n strictly above k has a larger total.
    for (int total = outcomes.max_photons(); total >= 0; --total) {
        const auto [offset, count] = outcomes.sector(total);
        for (std::size_t i = offset; i < offset + count; ++i) {
            const Occupation& k = outcomes.state_at(i);
            double rhs = detected(static_cast<Eigen::Index>(i));
            for (std::size_t m = offset + count; m < outcomes.size(); ++m) {
                const Occupation& n = outcomes.state_at(m);
                if (dominates(n, k)) rhs -= binomial_thinning(n, k, model) * truth(static_cast<Eigen::Index>(m));
            }
            truth(static_cast<Eigen::Index>(i)) = rhs / binomial_thinning(k, k, model);
        }
    }
    res.min_value = truth.minCoeff();
    if (project) {
        truth = project_to_simplex(truth);
        res.projected = true;
    }
    res.values = std::move(truth);
    return res;
}

RVector project_to_simplex(const RVector& v) {
    if (v.size() == 0) return v;
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cumulative += u[i];
        const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) tau = t;
    }
    return (v.array() - tau).cwiseMax(0.0);
}

Count required_mixture_configs(int modes, int measured_modes, int max_photons) {
    Count r = 0;
    for (int n = 1; n <= max_photons; ++n) r = std::max(r, min_configs_extended(n, modes, measured_modes));
    return r;
}

MixtureEstimate reconstruct_mixture(std::span<const MeasurementRecord> records, std::span<const InterferometerConfig> configs,
                                    int modes, int max_photons, const std::optional<DetectorModel>& detector,
                                    const RankOptions& options) {
    if (configs.empty()) throw ValidationError("reconstruct_mixture: no configurations");
    if (records.size() != configs.size()) throw ValidationError("reconstruct_mixture: one record per configuration required");
    const int measured = configs.front().modes();
    const TruncatedBasis outcomes(measured, max_photons);

    std::vector<RVector> data;
    data.reserve(records.size());
    for (std::size_t j = 0; j < records.size(); ++j) {
        if (records[j].config_index != j) throw ValidationError("reconstruct_mixture: records out of configuration order");
        RVector f = records[j].frequencies();
        if (f.size() != static_cast<Eigen::Index>(outcomes.size())) {
            throw ValidationError("reconstruct_mixture: record length does not match the truncated outcome space");
        }
        if (detector) f = invert_detector_response(outcomes, f, *detector).values;
        data.push_back(std::move(f));
    }

    MixtureEstimate est;
    std::vector<int> present;
    for (int n = 0; n <= max_photons; ++n) {
        const auto [offset, count] = outcomes.sector(n);
        double mass = 0.0;
        for (const auto& f : data) mass += f.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(count)).sum();
        mass /= static_cast<double>(data.size());
        est.weights[n] = mass;
        if (mass > 1e-12) present.push_back(n);
    }

    Count needed = 0;
    for (int n : present) {
        if (n >= 1) needed = std::max(needed, min_configs_extended(n, modes, measured));
    }
    if (configs.size() < needed) {
        throw ValidationError("reconstruct_mixture: " + std::to_string(configs.size()) + " configurations, at least " +
                              std::to_string(needed) + " required");
    }

    std::vector<int> deficient;
    std::map<int, Superoperator> sectors;
    for (int n : present) {
        if (n == 0) continue;
        Superoperator l = build_superoperator(configs, n, modes);
        if (!gramian_rank(l, options).complete()) {
            deficient.push_back(n);
        } else {
            sectors.emplace(n, std::move(l));
        }
    }
    if (!deficient.empty()) {
        std::string list;
        for (int n : deficient) list += (list.empty() ? "" : ", ") + std::to_string(n);
        throw NumericalError("reconstruct_mixture: configurations are incomplete for N = " + list);
    }

    for (int n : present) {
        if (n == 0) {
            const FockBasis vac(0, modes);
            est.states.emplace(0, Reconstruction{CMatrix::Ones(1, 1), maximally_mixed(vac), 0.0, RankReport{1, 1, 1.0, 1.0, 0.0, 0.0}});
            continue;
        }
        std::vector<MeasurementRecord> sector_records;
        sector_records.reserve(data.size());
        for (std::size_t j = 0; j < data.size(); ++j) {
            MeasurementRecord r;
            r.config_index = j;
            r.probabilities = postselect_total(outcomes, data[j], n).conditional;
            sector_records.push_back(std::move(r));
        }
        est.states.emplace(n, reconstruct(sectors.at(n), sector_records, options));
    }
    return est;
}

} // namespace lotomo
