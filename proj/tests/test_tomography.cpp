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

#include <numbers>

#include "lotomo/combinatorics.hpp"
#include "lotomo/tomography.hpp"
#include "oracles.hpp"

using namespace lotomo;

namespace {

CMatrix hadamard_bs() {
    const double h = std::numbers::sqrt2 / 2.0;
    CMatrix g(2, 2);
    g << h, h, h, -h;
    return g;
}

std::vector<InterferometerConfig> haar_run(int modes, std::uint64_t seed, std::size_t count) {
    std::vector<InterferometerConfig> cfgs;
    for (std::size_t j = 0; j < count; ++j) cfgs.push_back(generate_config_in_run(Generator::haar, modes, seed, j));
    return cfgs;
}

// p_nu = <nu| U^dagger rho U |nu> with U from the expansion oracle and rho
// padded with vacuum modes.
RVector oracle_probabilities(const DensityMatrix& rho, const CMatrix& g) {
    const int mp = static_cast<int>(g.rows());
    const FockBasis out(rho.photons(), mp);
    CMatrix padded = CMatrix::Zero(static_cast<Eigen::Index>(out.size()), static_cast<Eigen::Index>(out.size()));
    for (std::size_t a = 0; a < rho.dim(); ++a)
        for (std::size_t b = 0; b < rho.dim(); ++b) {
            const auto ia = out.index_of(pad_with_vacuum(rho.basis().state_at(a), mp));
            const auto ib = out.index_of(pad_with_vacuum(rho.basis().state_at(b), mp));
            padded(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(ib)) =
                rho.matrix()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
    const CMatrix u = oracle::lift_by_expansion(g, rho.photons());
    return (u.adjoint() * padded * u).diagonal().real();
}

} // namespace

TEST_CASE("density matrix validation") {
    const FockBasis b(1, 2);
    CHECK_NOTHROW(DensityMatrix(b, CMatrix::Identity(2, 2) / 2.0));
    CHECK_THROWS_AS(DensityMatrix(b, CMatrix::Identity(2, 2)), ValidationError);
    CMatrix non_herm = CMatrix::Identity(2, 2) / 2.0;
    non_herm(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix(b, non_herm), ValidationError);
    CMatrix negative(2, 2);
    negative << 1.5, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(DensityMatrix(b, negative), ValidationError);
    CHECK_THROWS_AS(DensityMatrix(b, CMatrix::Identity(3, 3) / 3.0), ValidationError);
}

TEST_CASE("random states are valid and seeded") {
    for (int rank : {0, 1, 2}) {
        const DensityMatrix rho = random_density_matrix(2, 3, 5, rank);
        CHECK(rho.dim() == 6);
        if (rank > 0) {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
            CHECK((es.eigenvalues().array() > 1e-12).count() == rank);
        }
    }
    CHECK(random_density_matrix(2, 2, 9).matrix() == random_density_matrix(2, 2, 9).matrix());
}

TEST_CASE("flatten is row-major and invertible") {
    CMatrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    const CVector f = flatten(m);
    CHECK(f(1) == Complex(2.0));
    CHECK(f(2) == Complex(3.0));
    CHECK(unflatten(f, 2) == m);
}

TEST_CASE("outcome probabilities") {
    const FockBasis b(2, 2);
    const InterferometerConfig identity(CMatrix::Identity(2, 2));
    const RVector p = outcome_probabilities(fock_projector(b, Occupation{2, 0}), identity);
    CHECK(p(0) == doctest::Approx(1.0));
    CHECK(p.tail(2).cwiseAbs().maxCoeff() < 1e-15);

    const RVector hom = outcome_probabilities(fock_projector(b, Occupation{1, 1}), InterferometerConfig(hadamard_bs()));
    CHECK(std::abs(hom(1)) <= 1e-12);
    CHECK(std::abs(hom(0) - 0.5) <= 1e-12);
    CHECK(std::abs(hom(2) - 0.5) <= 1e-12);

    const FockBasis b3(2, 3);
    const RVector flat = outcome_probabilities(maximally_mixed(b3), haar_random_unitary(3, 8));
    CHECK((flat.array() - 1.0 / 6.0).abs().maxCoeff() < 1e-12);

    const DensityMatrix rho = random_density_matrix(2, 2, 17);
    CHECK_THROWS_AS(outcome_probabilities(rho, haar_random_unitary(1, 1)), ValidationError);
    const auto g = haar_random_unitary(4, 18);
    const RVector padded = outcome_probabilities(rho, g);
    CHECK(padded.size() == 10);
    CHECK(std::abs(padded.sum() - 1.0) < 1e-10);
    CHECK((padded - oracle_probabilities(rho, g.matrix())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("superoperator shape and single-photon pattern") {
    const auto cfgs = haar_run(2, 3, 1);
    const Superoperator l = build_superoperator(cfgs, 1, 2);
    REQUIRE(l.matrix.rows() == 2);
    REQUIRE(l.matrix.cols() == 4);
    const CMatrix& u = cfgs.front().matrix();
    for (Eigen::Index nu = 0; nu < 2; ++nu) {
        CHECK(std::abs(l.matrix(nu, 0) - std::norm(u(0, nu))) < 1e-15);
        CHECK(std::abs(l.matrix(nu, 1) - std::conj(u(0, nu)) * u(1, nu)) < 1e-15);
        CHECK(std::abs(l.matrix(nu, 2) - std::conj(u(1, nu)) * u(0, nu)) < 1e-15);
        CHECK(std::abs(l.matrix(nu, 3) - std::norm(u(1, nu))) < 1e-15);
    }
    CHECK(build_superoperator(haar_run(3, 1, 4), 2, 2).matrix.rows() == 4 * 6);
    CHECK_THROWS_AS(build_superoperator(haar_run(2, 1, 1), 1, 3), ValidationError);
}

TEST_CASE("superoperator reproduces outcome probabilities") {
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n)
        for (int m = 2; m <= 4; ++m)
            for (int mp = m; mp <= 4; ++mp) {
                if (fock_dimension(n, m) > 20) continue;
                const auto cfgs = haar_run(mp, static_cast<std::uint64_t>(n * 100 + m * 10 + mp), 2);
                const Superoperator l = build_superoperator(cfgs, n, m);
                const DensityMatrix rho = random_density_matrix(n, m, static_cast<std::uint64_t>(n + m + mp));
                const CVector lp = l.matrix * flatten(rho.matrix());
                const auto per = static_cast<Eigen::Index>(l.outcomes_per_config());
                for (std::size_t j = 0; j < cfgs.size(); ++j) {
                    const RVector p = outcome_probabilities(rho, cfgs[j]);
                    worst = std::max(worst, (lp.segment(static_cast<Eigen::Index>(j) * per, per) - p.cast<Complex>())
                                                .cwiseAbs()
                                                .maxCoeff());
                }
            }
    CHECK(worst <= 1e-12);
}

TEST_CASE("gramian rank") {
    const auto one = haar_run(2, 3, 1);
    const RankReport r1 = gramian_rank(build_superoperator(one, 1, 2));
    CHECK(r1.rank == 2);
    CHECK(r1.full_rank == 4);
    CHECK_FALSE(r1.complete());

    const auto three = haar_run(2, 3, 3);
    const Superoperator l3 = build_superoperator(three, 1, 2);
    const RankReport r3 = gramian_rank(l3);
    CHECK(r3.rank == 4);
    CHECK(r3.complete());
    CHECK(static_cast<Eigen::Index>(r3.rank) == oracle::lu_rank(l3.matrix, 1e-10));

    std::vector<InterferometerConfig> doubled = three;
    doubled.push_back(three.front());
    CHECK(gramian_rank(build_superoperator(doubled, 1, 2)).rank == 4);

    for (int n = 1; n <= 3; ++n) {
        std::vector<InterferometerConfig> id{InterferometerConfig(CMatrix::Identity(2, 2))};
        CHECK_FALSE(is_complete(id, n, 2));
    }

    // A huge relative tolerance discards everything but the largest values.
    RankOptions loose;
    loose.relative_tolerance = 0.99;
    CHECK(gramian_rank(l3, loose).rank < 4);
}

TEST_CASE("completeness thresholds") {
    for (auto [n, m] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
        const auto need = static_cast<std::size_t>(min_configs(n, m));
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const auto cfgs = haar_run(m, seed, need);
            CHECK(is_complete(cfgs, n, m));
            CHECK_FALSE(is_complete(std::span(cfgs).first(need - 1), n, m));
        }
    }
}

TEST_CASE("rank is monotone and grows by at most D_{N,M'} per config") {
    const auto cfgs = haar_run(3, 44, 12);
    std::size_t previous = 0;
    for (std::size_t r = 1; r <= cfgs.size(); ++r) {
        const std::size_t rank = gramian_rank(build_superoperator(std::span(cfgs).first(r), 2, 3)).rank;
        CHECK(rank >= previous);
        CHECK(rank - previous <= 6);
        CHECK(rank <= 36);
        previous = rank;
    }
}

TEST_CASE("reconstruction round trip") {
    for (auto [n, m] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}}) {
        const auto cfgs = haar_run(m, 5, static_cast<std::size_t>(min_configs(n, m)));
        const Superoperator l = build_superoperator(cfgs, n, m);
        double worst = 0.0;
        for (int s = 0; s < 20; ++s) {
            const DensityMatrix rho = random_density_matrix(n, m, derive_seed(99, static_cast<std::uint64_t>(s)), s % 3);
            const Reconstruction rec = reconstruct(l, simulate_records(rho, cfgs, 0, 0));
            worst = std::max(worst, trace_distance(rec.raw, rho.matrix()));
            CHECK(rec.rank.complete());
            CHECK(rec.residual < 1e-10);
        }
        CHECK(worst <= 1e-8);
    }
    const FockBasis b(2, 2);
    const auto cfgs = haar_run(2, 6, 5);
    const DensityMatrix fock = fock_projector(b, Occupation{1, 1});
    const Reconstruction rec = reconstruct(build_superoperator(cfgs, 2, 2), simulate_records(fock, cfgs, 0, 0));
    CHECK((rec.raw - fock.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("pseudo-inverse equals the normal-equation solution") {
    for (auto [n, m] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{2, 3}}) {
        const auto cfgs = haar_run(m, 12, static_cast<std::size_t>(min_configs(n, m)) + 2);
        const Superoperator l = build_superoperator(cfgs, n, m);
        const DensityMatrix rho = random_density_matrix(n, m, 13);
        auto records = simulate_records(rho, cfgs, 0, 0);
        // Perturb the data so the solution is a genuine least-squares fit.
        Rng rng(14);
        std::normal_distribution<double> noise(0.0, 1e-3);
        CVector p(l.matrix.rows());
        Eigen::Index k = 0;
        for (auto& r : records) {
            for (Eigen::Index i = 0; i < r.probabilities.size(); ++i) r.probabilities(i) = std::abs(r.probabilities(i) + noise(rng));
            for (Eigen::Index i = 0; i < r.probabilities.size(); ++i) p(k++) = r.probabilities(i);
        }
        const CMatrix dense = l.matrix;
        const CVector expected = oracle::normal_equation_solve(dense, p);
        const Reconstruction rec = reconstruct(l, records);
        CHECK((flatten(rec.raw) - expected).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(std::abs(rec.residual - (dense * expected - p).norm()) <= 1e-8);
    }
}

TEST_CASE("reconstruct rejects bad input") {
    const auto cfgs = haar_run(2, 3, 3);
    const Superoperator l = build_superoperator(cfgs, 1, 2);
    const DensityMatrix rho = random_density_matrix(1, 2, 1);
    auto records = simulate_records(rho, cfgs, 0, 0);
    std::swap(records[0], records[1]);
    CHECK_THROWS_AS(reconstruct(l, records), ValidationError);
    records.pop_back();
    CHECK_THROWS_AS(reconstruct(l, records), ValidationError);

    const Superoperator short_l = build_superoperator(std::span(cfgs).first(2), 1, 2);
    try {
        (void)reconstruct(short_l, simulate_records(rho, std::span(cfgs).first(2), 0, 0));
        FAIL("expected a rank-deficiency error");
    } catch (const RankDeficientError& e) {
        CHECK(e.rank() == 3);
        CHECK(e.deficit() == 1);
    }
}

TEST_CASE("projection keeps a valid state and reports the raw one") {
    const auto cfgs = haar_run(2, 21, 5);
    const DensityMatrix rho = random_density_matrix(2, 2, 22, 1);
    const Reconstruction rec = reconstruct(build_superoperator(cfgs, 2, 2), simulate_records(rho, cfgs, 2000, 23));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rec.projected.matrix());
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK(std::abs(rec.projected.matrix().trace() - 1.0) < 1e-12);
    CHECK(trace_distance(rec.raw, rec.projected.matrix()) > 0.0);
}

TEST_CASE("find_min_configs") {
    const auto a = find_min_configs(2, 2, 2, Generator::haar, 1, 20);
    CHECK(a.found);
    CHECK(a.configs_used == 5);
    CHECK(a.gap() == 0);
    CHECK(find_min_configs(2, 2, 2, Generator::mesh, 1, 20).configs_used == 5);
    CHECK(find_min_configs(2, 3, 3, Generator::haar, 1, 20).configs_used == 9);
    CHECK(find_min_configs(2, 2, 4, Generator::haar, 1, 20).configs_used == 1);
    for (std::size_t i = 1; i < a.rank_trace.size(); ++i) CHECK(a.rank_trace[i] >= a.rank_trace[i - 1]);

    const auto capped = find_min_configs(2, 3, 3, Generator::haar, 1, 4);
    CHECK_FALSE(capped.found);
    CHECK(capped.best_rank < capped.full_rank);
    CHECK(capped.configs_used == 4);

    for (int n = 1; n <= 3; ++n)
        for (int m = 2; m <= 3; ++m)
            for (int mp = m; mp <= m + 2; ++mp) {
                const auto res = find_min_configs(n, m, mp, Generator::haar, 3, 40);
                CHECK(res.found);
                CHECK(res.configs_used >= res.lower_bound);
            }
}

TEST_CASE("find_min_modes") {
    CHECK(find_min_modes(2, 2, Generator::haar, 1, 8).measured_modes == 4);
    CHECK(find_min_modes(1, 2, Generator::haar, 1, 8).measured_modes == 4);
    const auto res = find_min_modes(2, 3, Generator::mesh, 1, 12);
    CHECK(res.found);
    CHECK(res.measured_modes >= res.lower_bound);
    CHECK_FALSE(find_min_modes(2, 2, Generator::haar, 1, 3).found);
}

TEST_CASE("sample_shots") {
    RVector indicator = RVector::Zero(5);
    indicator(3) = 1.0;
    const auto counts = sample_shots(indicator, 1234, 1);
    CHECK(counts == std::vector<std::uint64_t>{0, 0, 0, 1234, 0});
    CHECK(sample_shots(indicator, 0, 1) == std::vector<std::uint64_t>(5, 0));

    const RVector uniform = RVector::Constant(8, 1.0 / 8.0);
    const std::uint64_t shots = 100000;
    const auto u = sample_shots(uniform, shots, 2);
    const double sigma = std::sqrt(shots * (1.0 / 8.0) * (7.0 / 8.0));
    std::uint64_t total = 0;
    for (auto c : u) {
        CHECK(std::abs(static_cast<double>(c) - shots / 8.0) <= 5.0 * sigma);
        total += c;
    }
    CHECK(total == shots);
    CHECK(sample_shots(uniform, shots, 2) == u);
}

TEST_CASE("measurement records") {
    const auto r = MeasurementRecord::from_counts(2, {1, 3});
    CHECK(r.sampled());
    CHECK(r.shots == 4);
    CHECK(r.frequencies()(1) == doctest::Approx(0.75));
    CHECK_THROWS_AS(MeasurementRecord::exact(0, RVector::Constant(2, -0.5)), ValidationError);
}

TEST_CASE("generators") {
    CHECK(generator_from_string("mesh") == Generator::mesh);
    CHECK_THROWS_AS(generator_from_string("magic"), ValidationError);
    const auto c = generate_config_in_run(Generator::mesh, 3, 5, 2);
    CHECK(c.provenance().source == ConfigSource::mesh);
    CHECK(c.matrix() == generate_config_in_run(Generator::mesh, 3, 5, 2).matrix());
    CHECK(c.matrix() != generate_config_in_run(Generator::mesh, 3, 5, 3).matrix());
}
