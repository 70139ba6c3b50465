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

#include <doctest.h>

#include <numeric>

#include "lotomo/combinatorics.hpp"
#include "lotomo/imperfections.hpp"
#include "lotomo/random.hpp"

using namespace lotomo;

namespace {

RVector random_distribution(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RVector p(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = u(rng);
    return p / p.sum();
}

PhotonNumberMixture two_sector_mixture(int modes, std::uint64_t seed) {
    return PhotonNumberMixture({{0.35, random_density_matrix(1, modes, derive_seed(seed, 1))},
                                {0.65, random_density_matrix(2, modes, derive_seed(seed, 2))}});
}

std::vector<InterferometerConfig> haar_run(int modes, std::uint64_t seed, std::size_t count) {
    std::vector<InterferometerConfig> cfgs;
    for (std::size_t j = 0; j < count; ++j) cfgs.push_back(generate_config_in_run(Generator::haar, modes, seed, j));
    return cfgs;
}

} // namespace

TEST_CASE("truncated basis") {
    const TruncatedBasis t(2, 3);
    CHECK(t.size() == 1 + 2 + 3 + 4);
    CHECK(t.state_at(0) == Occupation{0, 0});
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.index_of(t.state_at(i)) == i);
    const auto [offset, count] = t.sector(2);
    CHECK(offset == 3);
    CHECK(count == 3);
    CHECK(t.state_at(offset) == Occupation{2, 0});
    CHECK_THROWS_AS(t.sector(4), ValidationError);
}

TEST_CASE("mixture validation") {
    const auto a = random_density_matrix(1, 2, 1);
    const auto b = random_density_matrix(2, 2, 2);
    CHECK_THROWS_AS(PhotonNumberMixture({{0.5, a}, {0.4, b}}), ValidationError);
    CHECK_THROWS_AS(PhotonNumberMixture({{0.5, a}, {0.5, a}}), ValidationError);
    CHECK_THROWS_AS(PhotonNumberMixture({{0.5, a}, {0.5, random_density_matrix(2, 3, 2)}}), ValidationError);
    const PhotonNumberMixture mix({{0.5, b}, {0.5, a}});
    CHECK(mix.components().front().state.photons() == 1);
    CHECK(mix.max_photons() == 2);
}

TEST_CASE("mixture probabilities") {
    const auto rho = random_density_matrix(2, 2, 3);
    const auto g = haar_random_unitary(3, 4);
    const auto single = mixture_probabilities(PhotonNumberMixture({{1.0, rho}}), g);
    CHECK((single.at(2).conditional - outcome_probabilities(rho, g)).cwiseAbs().maxCoeff() == 0.0);

    const PhotonNumberMixture half({{0.5, random_density_matrix(1, 2, 5)}, {0.5, rho}});
    const TruncatedBasis space(3, 2);
    const RVector joint = joint_distribution(half, g, space);
    CHECK(std::abs(joint.sum() - 1.0) < 1e-12);
    CHECK(std::abs(postselect_total(space, joint, 1).sector_mass - 0.5) < 1e-12);
    CHECK(std::abs(postselect_total(space, joint, 2).sector_mass - 0.5) < 1e-12);
    CHECK((postselect_total(space, joint, 2).conditional - outcome_probabilities(rho, g)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(postselect_total(space, joint, 0), NumericalError);
}

TEST_CASE("postselection on a lossless single-N input") {
    const auto rho = random_density_matrix(2, 2, 6);
    const auto g = haar_random_unitary(2, 7);
    const TruncatedBasis space(2, 2);
    const RVector joint = joint_distribution(PhotonNumberMixture({{1.0, rho}}), g, space);
    const auto ps = postselect_total(space, joint, 2);
    CHECK(ps.sector_mass == doctest::Approx(1.0));
    CHECK((ps.conditional - outcome_probabilities(rho, g)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("detector response") {
    const TruncatedBasis space(2, 3);
    const RVector p = random_distribution(space.size(), 8);
    CHECK((detector_response(space, p, DetectorModel::uniform(2, 1.0)) - p).cwiseAbs().maxCoeff() < 1e-15);

    const TruncatedBasis one(1, 1);
    RVector single(2);
    single << 0.0, 1.0;
    const RVector half = detector_response(one, single, DetectorModel::uniform(1, 0.5));
    CHECK(half(0) == doctest::Approx(0.5));
    CHECK(half(1) == doctest::Approx(0.5));

    const double eta = 0.7;
    RVector both = RVector::Zero(static_cast<Eigen::Index>(space.size()));
    both(static_cast<Eigen::Index>(space.index_of(Occupation{1, 1}))) = 1.0;
    const RVector detected = detector_response(space, both, DetectorModel::uniform(2, eta));
    CHECK(std::abs(detected(static_cast<Eigen::Index>(space.index_of(Occupation{1, 1}))) - eta * eta) < 1e-15);
    CHECK(std::abs(detected.sum() - 1.0) < 1e-15);

    const DetectorModel lossy({0.9, 0.8}, 0.5);
    CHECK(lossy.efficiency(1) == doctest::Approx(0.4));
    CHECK_THROWS_AS(DetectorModel({0.0, 0.5}), ValidationError);
    CHECK_THROWS_AS(DetectorModel({1.2}), ValidationError);
    CHECK_THROWS_AS(detector_response(space, p, DetectorModel::uniform(3, 0.5)), ValidationError);
}

TEST_CASE("uniform loss scales each sector by eta^N") {
    for (double eta : {0.5, 0.8, 0.95})
        for (int n = 1; n <= 3; ++n) {
            const TruncatedBasis space(3, n);
            const auto rho = random_density_matrix(n, 2, derive_seed(10, n));
            const RVector joint = joint_distribution(PhotonNumberMixture({{1.0, rho}}), haar_random_unitary(3, 11), space);
            const RVector detected = detector_response(space, joint, DetectorModel::uniform(3, eta));
            CHECK(std::abs(postselect_total(space, detected, n).sector_mass - std::pow(eta, n)) <= 1e-12);
        }
}

TEST_CASE("detector inversion round trip") {
    for (double eta : {0.5, 0.7, 0.9})
        for (int m = 1; m <= 3; ++m)
            for (int n_max = 0; n_max <= 3; ++n_max) {
                const TruncatedBasis space(m, n_max);
                const RVector p = random_distribution(space.size(), derive_seed(m, n_max));
                const DetectorModel model = DetectorModel::uniform(m, eta);
                const DetectorInversion inv = invert_detector_response(space, detector_response(space, p, model), model);
                CHECK((inv.values - p).cwiseAbs().maxCoeff() <= 1e-10);
                CHECK_FALSE(inv.truncation_warning);
            }
    const TruncatedBasis space(2, 2);
    const DetectorModel model({0.6, 0.85});
    const RVector p = random_distribution(space.size(), 3);
    CHECK((invert_detector_response(space, detector_response(space, p, model), model).values - p).cwiseAbs().maxCoeff() <= 1e-12);
    const RVector q = random_distribution(space.size(), 4);
    CHECK((invert_detector_response(space, q, DetectorModel::uniform(2, 1.0)).values - q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noisy inversion reports negatives and truncation") {
    const TruncatedBasis space(2, 2);
    const DetectorModel model = DetectorModel::uniform(2, 0.5);
    RVector noisy = RVector::Zero(static_cast<Eigen::Index>(space.size()));
    noisy(0) = 1.0; // only vacuum detected: consistent with no input at all
    noisy(static_cast<Eigen::Index>(space.index_of(Occupation{1, 1}))) = 0.01;
    noisy(0) -= 0.01;
    const auto raw = invert_detector_response(space, noisy, model);
    CHECK(raw.min_value < 0.0);
    CHECK_FALSE(raw.projected);
    const auto projected = invert_detector_response(space, noisy, model, true);
    CHECK(projected.projected);
    CHECK(projected.values.minCoeff() >= 0.0);
    CHECK(std::abs(projected.values.sum() - 1.0) < 1e-12);

    RVector short_mass = RVector::Constant(static_cast<Eigen::Index>(space.size()), 0.1);
    CHECK(invert_detector_response(space, short_mass, model).truncation_warning);
}

TEST_CASE("simplex projection") {
    RVector inside(3);
    inside << 0.2, 0.3, 0.5;
    CHECK((project_to_simplex(inside) - inside).cwiseAbs().maxCoeff() < 1e-15);
    RVector v(3);
    v << 1.0, 1.0, -1.0;
    const RVector p = project_to_simplex(v);
    CHECK(p(0) == doctest::Approx(0.5));
    CHECK(p(1) == doctest::Approx(0.5));
    CHECK(p(2) == 0.0);
}

TEST_CASE("required_mixture_configs") {
    CHECK(required_mixture_configs(2, 2, 3) == 7);
    CHECK(required_mixture_configs(2, 4, 2) == min_configs_extended(2, 2, 4));
}

TEST_CASE("mixture reconstruction") {
    for (int m : {2, 3}) {
        const PhotonNumberMixture mix = two_sector_mixture(m, 40 + m);
        const int n_max = mix.max_photons();
        const auto cfgs = haar_run(m, 50 + m, static_cast<std::size_t>(required_mixture_configs(m, m, n_max)));
        const TruncatedBasis space(m, n_max);
        for (std::optional<double> eta : {std::optional<double>{}, std::optional<double>{0.9}}) {
            std::optional<DetectorModel> detector;
            if (eta) detector = DetectorModel::uniform(m, *eta);
            std::vector<MeasurementRecord> records;
            for (std::size_t j = 0; j < cfgs.size(); ++j) {
                RVector p = joint_distribution(mix, cfgs[j], space);
                if (detector) p = detector_response(space, p, *detector);
                records.push_back(MeasurementRecord::exact(j, p));
            }
            const MixtureEstimate est = reconstruct_mixture(records, cfgs, m, n_max, detector);
            CHECK(std::abs(est.weights.at(0)) <= 1e-10);
            for (const auto& c : mix.components()) {
                const int n = c.state.photons();
                CHECK(std::abs(est.weights.at(n) - c.weight) <= 1e-10);
                CHECK(trace_distance(est.states.at(n).raw, c.state.matrix()) <= 1e-8);
            }
        }
    }
}

TEST_CASE("mixture reconstruction does not depend on component order") {
    const auto a = random_density_matrix(1, 2, 60);
    const auto b = random_density_matrix(2, 2, 61);
    const PhotonNumberMixture ab({{0.3, a}, {0.7, b}});
    const PhotonNumberMixture ba({{0.7, b}, {0.3, a}});
    const auto cfgs = haar_run(2, 62, 5);
    const TruncatedBasis space(2, 2);
    std::vector<MeasurementRecord> ra, rb;
    for (std::size_t j = 0; j < cfgs.size(); ++j) {
        ra.push_back(MeasurementRecord::exact(j, joint_distribution(ab, cfgs[j], space)));
        rb.push_back(MeasurementRecord::exact(j, joint_distribution(ba, cfgs[j], space)));
    }
    const auto ea = reconstruct_mixture(ra, cfgs, 2, 2);
    const auto eb = reconstruct_mixture(rb, cfgs, 2, 2);
    CHECK(ea.weights == eb.weights);
    CHECK(ea.states.at(2).raw == eb.states.at(2).raw);
}

TEST_CASE("mixture reconstruction names deficient sectors") {
    const PhotonNumberMixture mix = two_sector_mixture(2, 70);
    const TruncatedBasis space(2, 2);
    // Five copies of one configuration: enough in number, never complete.
    std::vector<InterferometerConfig> cfgs(5, haar_random_unitary(2, 71));
    std::vector<MeasurementRecord> records;
    for (std::size_t j = 0; j < cfgs.size(); ++j) records.push_back(MeasurementRecord::exact(j, joint_distribution(mix, cfgs[j], space)));
    try {
        (void)reconstruct_mixture(records, cfgs, 2, 2);
        FAIL("expected an incompleteness error");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("N = 1, 2") != std::string::npos);
    }
    CHECK_THROWS_AS(reconstruct_mixture(std::span(records).first(3), std::span(cfgs).first(3), 2, 2), ValidationError);
}
