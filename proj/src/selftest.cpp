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

#include "lotomo/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "lotomo/analytic_m2.hpp"
#include "lotomo/combinatorics.hpp"
#include "lotomo/imperfections.hpp"
#include "lotomo/kernels/kernels.hpp"
#include "lotomo/linear_optics.hpp"
#include "lotomo/random.hpp"
#include "lotomo/tomography.hpp"

namespace lotomo::selftest {

bool Report::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<Check> Report::failures() const {
    std::vector<Check> out;
    std::copy_if(checks.begin(), checks.end(), std::back_inserter(out), [](const Check& c) { return !c.passed; });
    return out;
}

namespace {

constexpr std::uint64_t kSeed = 20260101;

std::string sci(double x) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << x;
    return s.str();
}

Complex naive_permanent(const CMatrix& a) {
    const auto n = static_cast<int>(a.rows());
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    Complex sum = 0.0;
    do {
        Complex p = 1.0;
        for (int i = 0; i < n; ++i) p *= a(i, perm[static_cast<std::size_t>(i)]);
        sum += p;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum;
}

CMatrix random_complex(int n, Rng& rng) {
    std::normal_distribution<double> gauss;
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = {gauss(rng), gauss(rng)};
    return a;
}

using Body = std::function<std::pair<bool, std::string>()>;

void run(Report& r, std::string module, std::string invariant, const Body& body) {
    Check c{std::move(module), std::move(invariant), false, {}};
    try {
        auto [ok, detail] = body();
        c.passed = ok;
        c.detail = std::move(detail);
    } catch (const std::exception& e) {
        c.detail = std::string("threw: ") + e.what();
    }
    r.checks.push_back(std::move(c));
}

std::pair<bool, std::string> within(double err, double tol) {
    return {err <= tol, "max error " + sci(err) + " (tolerance " + sci(tol) + ")"};
}

} // namespace

Report run_all() {
    Report r;

    run(r, "combinatorics", "dimension_sum", [] {
        for (int m = 2; m <= 4; ++m)
            for (int n = 0; n <= 4; ++n) {
                Count s = 0;
                for (int l = 0; l <= n; ++l) s += binomial(static_cast<std::uint64_t>(l + m - 2), static_cast<std::uint64_t>(l));
                if (s != fock_dimension(n, m)) return std::pair{false, "N=" + std::to_string(n) + " M=" + std::to_string(m)};
            }
        return std::pair{true, std::string("N<=4, M<=4")};
    });

    run(r, "combinatorics", "two_mode_bound", [] {
        for (int n = 1; n <= 4; ++n) {
            if (min_configs(n, 2) != static_cast<Count>(2 * n + 1)) return std::pair{false, "N=" + std::to_string(n)};
        }
        return std::pair{true, std::string("R_{N,2} = 2N+1 for N<=4")};
    });

    run(r, "kernels", "isa_equivalence", [] {
        Rng rng(derive_seed(kSeed, 1));
        double err = 0.0;
        for (kernels::Isa isa : kernels::supported_isas()) {
            const auto& t = kernels::table(isa);
            const auto& s = kernels::table(kernels::Isa::scalar);
            for (std::size_t n = 1; n <= 6; ++n) {
                CMatrix a = random_complex(static_cast<int>(n), rng);
                const std::size_t stride = kernels::padded_rows(n);
                std::vector<double> re(stride * n, 0.0), im(stride * n, 0.0);
                for (std::size_t c = 0; c < n; ++c)
                    for (std::size_t i = 0; i < n; ++i) {
                        re[c * stride + i] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)).real();
                        im[c * stride + i] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)).imag();
                    }
                const Complex ref = s.ryser(re, im, n, stride);
                err = std::max(err, std::abs(t.ryser(re, im, n, stride) - ref) / std::max(1.0, std::abs(ref)));
            }
        }
        return within(err, 1e-12);
    });

    run(r, "linear_optics", "permanent_oracle", [] {
        Rng rng(derive_seed(kSeed, 2));
        double err = 0.0;
        for (int k = 0; k < 20; ++k) {
            const int n = 1 + k % 6;
            CMatrix a = random_complex(n, rng);
            const Complex ref = naive_permanent(a);
            err = std::max(err, std::abs(permanent(a) - ref) / std::max(1e-300, std::abs(ref)));
        }
        return within(err, 1e-12);
    });

    run(r, "linear_optics", "hom_oracle", [] {
        const double h = std::numbers::sqrt2 / 2.0;
        CMatrix bs(2, 2);
        bs << h, h, h, -h;
        const InterferometerConfig cfg(bs);
        const FockBasis basis(2, 2);
        const Occupation in{1, 1};
        const RVector p = outcome_probabilities(fock_projector(basis, in), cfg);
        const double p11 = p(static_cast<Eigen::Index>(basis.index_of(Occupation{1, 1})));
        const double p20 = p(static_cast<Eigen::Index>(basis.index_of(Occupation{2, 0})));
        const double err = std::max(std::abs(p11), std::abs(p20 - 0.5));
        return std::pair{err <= 1e-12, "p(1,1)=" + sci(p11) + " p(2,0)=" + sci(p20)};
    });

    run(r, "linear_optics", "lift_homomorphism", [] {
        double err = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const CMatrix g = haar_random_unitary(3, derive_seed(kSeed, 10 + n)).matrix();
            const CMatrix h = haar_random_unitary(3, derive_seed(kSeed, 20 + n)).matrix();
            const CMatrix lg = lift_unitary(g, n).matrix;
            const CMatrix lh = lift_unitary(h, n).matrix;
            const CMatrix lgh = lift_unitary(g * h, n).matrix;
            err = std::max(err, (lg * lh - lgh).cwiseAbs().maxCoeff());
            err = std::max(err, unitarity_residual(lg));
        }
        return within(err, 1e-9);
    });

    run(r, "tomography", "superoperator_consistency", [] {
        double err = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const DensityMatrix rho = random_density_matrix(n, 2, derive_seed(kSeed, 30 + n));
            std::vector<InterferometerConfig> cfgs{haar_random_unitary(3, derive_seed(kSeed, 40 + n))};
            const Superoperator l = build_superoperator(cfgs, n, 2);
            const CVector lp = l.matrix * flatten(rho.matrix());
            const RVector p = outcome_probabilities(rho, cfgs.front());
            err = std::max(err, (lp - p.cast<Complex>()).cwiseAbs().maxCoeff());
        }
        return within(err, 1e-12);
    });

    run(r, "tomography", "completeness_threshold", [] {
        for (auto [n, m] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{2, 3}}) {
            const auto need = static_cast<std::size_t>(min_configs(n, m));
            std::vector<InterferometerConfig> cfgs;
            for (std::size_t j = 0; j < need; ++j) cfgs.push_back(generate_config_in_run(Generator::haar, m, kSeed, j));
            const bool full = is_complete(cfgs, n, m);
            cfgs.pop_back();
            const bool short_full = is_complete(cfgs, n, m);
            if (!full || short_full) {
                return std::pair{false, "N=" + std::to_string(n) + " M=" + std::to_string(m)};
            }
        }
        return std::pair{true, std::string("full rank exactly at R_{N,M}")};
    });

    run(r, "tomography", "round_trip", [] {
        double err = 0.0;
        for (auto [n, m] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{2, 3}}) {
            const auto need = static_cast<std::size_t>(min_configs(n, m));
            std::vector<InterferometerConfig> cfgs;
            for (std::size_t j = 0; j < need; ++j) cfgs.push_back(generate_config_in_run(Generator::haar, m, kSeed, j));
            const Superoperator l = build_superoperator(cfgs, n, m);
            const DensityMatrix rho = random_density_matrix(n, m, derive_seed(kSeed, 50 + n * 10 + m));
            const auto records = simulate_records(rho, cfgs, 0, 0);
            err = std::max(err, trace_distance(reconstruct(l, records).raw, rho.matrix()));
        }
        return within(err, 1e-8);
    });

    run(r, "analytic_m2", "schwinger_correspondence", [] {
        if (m2::calibrate_schwinger_sign() != m2::kSchwingerAngleSign) return std::pair{false, std::string("sign calibration drifted")};
        double err = 0.0;
        for (int n = 1; n <= 4; ++n) {
            const double theta = 0.3 + 0.1 * n;
            const CMatrix a = lift_unitary(m2::beamsplitter(theta), n).matrix;
            err = std::max(err, (a - m2::schwinger_beamsplitter_lift(n, theta)).cwiseAbs().maxCoeff());
        }
        return within(err, 1e-10);
    });

    run(r, "analytic_m2", "newton_young_complete", [] {
        for (int n = 1; n <= 4; ++n) {
            const auto cfgs = m2::newton_young_configs(n, m2::choose_theta(n));
            if (!is_complete(cfgs, n, 2)) return std::pair{false, "N=" + std::to_string(n)};
        }
        return std::pair{true, std::string("2N+1 configurations complete for N<=4")};
    });

    run(r, "imperfections", "loss_factor", [] {
        const double eta = 0.8;
        const DetectorModel model = DetectorModel::uniform(2, eta);
        const TruncatedBasis space(2, 3);
        double err = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const DensityMatrix rho = random_density_matrix(n, 2, derive_seed(kSeed, 60 + n));
            const InterferometerConfig cfg = haar_random_unitary(2, derive_seed(kSeed, 70 + n));
            const PhotonNumberMixture mix({{1.0, rho}});
            const RVector detected = detector_response(space, joint_distribution(mix, cfg, space), model);
            err = std::max(err, std::abs(postselect_total(space, detected, n).sector_mass - std::pow(eta, n)));
        }
        return within(err, 1e-12);
    });

    run(r, "imperfections", "response_inversion", [] {
        const TruncatedBasis space(3, 3);
        Rng rng(derive_seed(kSeed, 80));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        RVector p(static_cast<Eigen::Index>(space.size()));
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = u(rng);
        p /= p.sum();
        const DetectorModel model({0.5, 0.7, 0.9});
        const RVector back = invert_detector_response(space, detector_response(space, p, model), model).values;
        return within((back - p).cwiseAbs().maxCoeff(), 1e-10);
    });

    return r;
}

} // namespace lotomo::selftest
