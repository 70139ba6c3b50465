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

#include "lotomo/analytic_m2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/SVD>

namespace lotomo::m2 {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

} // namespace

double wigner_small_d(int two_j, int two_m1, int two_m2, double beta) {
    if (two_j < 0 || std::abs(two_m1) > two_j || std::abs(two_m2) > two_j || (two_j - two_m1) % 2 != 0 ||
        (two_j - two_m2) % 2 != 0) {
        throw ValidationError("wigner_small_d: invalid quantum numbers (2j=" + std::to_string(two_j) +
                              ", 2m1=" + std::to_string(two_m1) + ", 2m2=" + std::to_string(two_m2) + ")");
    }
    // Integer combinations j +- m are exact after halving the doubled values.
    const int jp1 = (two_j + two_m1) / 2, jm1 = (two_j - two_m1) / 2;
    const int jp2 = (two_j + two_m2) / 2, jm2 = (two_j - two_m2) / 2;
    const int dm = (two_m1 - two_m2) / 2; // m1 - m2
    const double c = std::cos(0.5 * beta);
    const double s = std::sin(0.5 * beta);
    const double pref = std::sqrt(factorial(jp1) * factorial(jm1) * factorial(jp2) * factorial(jm2));
    double sum = 0.0;
    for (int k = std::max(0, -dm); k <= std::min(jp2, jm1); ++k) {
        const double denom = factorial(jp2 - k) * factorial(k) * factorial(jm1 - k) * factorial(k + dm);
        const double sign = ((k + dm) % 2 == 0) ? 1.0 : -1.0;
        sum += sign / denom * std::pow(c, jp2 + jm1 - 2 * k) * std::pow(s, 2 * k + dm);
    }
    return pref * sum;
}

Eigen::MatrixXd wigner_small_d_matrix(int two_j, double beta) {
    const int n = two_j + 1;
    Eigen::MatrixXd d(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) d(r, c) = wigner_small_d(two_j, two_j - 2 * r, two_j - 2 * c, beta);
    }
    return d;
}

CMatrix beamsplitter(double theta) {
    CMatrix b(2, 2);
    b << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return b;
}

CMatrix phase_shift(double phi) {
    CMatrix p = CMatrix::Identity(2, 2);
    p(1, 1) = std::polar(1.0, phi);
    return p;
}

int calibrate_schwinger_sign() {
    // Generic angle so that neither sign choice matches by accident.
    const double theta = 0.37;
    const CMatrix lift = lift_unitary(beamsplitter(theta), 1).matrix;
    for (int sign : {+1, -1}) {
        const Eigen::MatrixXd d = wigner_small_d_matrix(1, sign * 2.0 * theta);
        if ((lift - d.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-12) return sign;
    }
    throw NumericalError("calibrate_schwinger_sign: no angle convention matches the one-photon lift");
}

CMatrix schwinger_beamsplitter_lift(int photons, double theta) {
    if (photons < 0) throw ValidationError("schwinger_beamsplitter_lift: negative photon number");
    return wigner_small_d_matrix(photons, kSchwingerAngleSign * 2.0 * theta).cast<Complex>();
}

double admissibility(int photons, double theta) {
    if (photons < 1) throw ValidationError("admissibility: need N >= 1");
    double worst = 1.0;
    for (int l = 1; l <= photons; ++l) {
        for (int m = -l; m <= l; ++m) {
            worst = std::min(worst, std::abs(wigner_small_d(2 * l, 2 * m, 0, 2.0 * theta)));
        }
    }
    return worst;
}

double choose_theta(int photons) {
    if (photons < 1) throw ValidationError("choose_theta: need N >= 1");
    double best_theta = 0.0;
    double best = -1.0;
    for (int k = 1; k <= kThetaGridPoints; ++k) {
        const double rotation = std::numbers::pi * k / (kThetaGridPoints + 1);
        const double theta = 0.5 * rotation;
        const double a = admissibility(photons, theta);
        if (a > best) {
            best = a;
            best_theta = theta;
        }
    }
    if (best < kAdmissibilityFloor) {
        throw NumericalError("choose_theta: no grid angle clears the admissibility floor for N=" +
                             std::to_string(photons));
    }
    return best_theta;
}

std::vector<double> newton_young_phases(int photons) {
    if (photons < 1) throw ValidationError("newton_young_phases: need N >= 1");
    const int r = 2 * photons + 1;
    std::vector<double> phases(static_cast<std::size_t>(r));
    for (int j = 0; j < r; ++j) phases[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / r;
    return phases;
}

std::vector<InterferometerConfig> newton_young_configs(int photons, double theta) {
    const auto phases = newton_young_phases(photons);
    const CMatrix bt = beamsplitter(theta).transpose();
    std::vector<InterferometerConfig> out;
    out.reserve(phases.size());
    for (std::size_t j = 0; j < phases.size(); ++j) {
        out.emplace_back(phase_shift(phases[j]) * bt,
                         Provenance{ConfigSource::newton_young, 0, static_cast<int>(j), theta});
    }
    return out;
}

Harmonics dft_harmonics(std::span<const RVector> data, int photons) {
    if (photons < 1) throw ValidationError("dft_harmonics: need N >= 1");
    const int r = 2 * photons + 1;
    if (static_cast<int>(data.size()) != r) {
        throw ValidationError("dft_harmonics: expected " + std::to_string(r) + " records, got " +
                              std::to_string(data.size()));
    }
    const Eigen::Index outcomes = data.front().size();
    for (const auto& d : data) {
        if (d.size() != outcomes) throw ValidationError("dft_harmonics: records differ in length");
    }
    const auto phases = newton_young_phases(photons);
    Harmonics h{photons, CMatrix::Zero(r, outcomes)};
    for (int harmonic = -photons; harmonic <= photons; ++harmonic) {
        for (int j = 0; j < r; ++j) {
            const Complex w = std::polar(1.0 / r, -phases[static_cast<std::size_t>(j)] * harmonic);
            h.coefficients.row(harmonic + photons) += w * data[static_cast<std::size_t>(j)].transpose().cast<Complex>();
        }
    }
    return h;
}

Harmonics dft_harmonics(std::span<const MeasurementRecord> records, int photons) {
    std::vector<RVector> data;
    data.reserve(records.size());
    for (std::size_t j = 0; j < records.size(); ++j) {
        if (records[j].config_index != j) {
            throw ValidationError("dft_harmonics: records are not in phase order");
        }
        data.push_back(records[j].frequencies());
    }
    return dft_harmonics(std::span<const RVector>(data), photons);
}

Reconstruction reconstruct_m2(std::span<const MeasurementRecord> records, int photons, double theta) {
    const Harmonics h = dft_harmonics(records, photons);
    const int d = photons + 1;
    if (h.coefficients.cols() != d) {
        throw ValidationError("reconstruct_m2: records must cover the N+1 two-mode outcomes");
    }
    // <alpha|U_j|nu> = e^{i phi_j n2(alpha)} W(alpha, nu) with W the lift of
    // beamsplitter(theta)^T = beamsplitter(-theta). In canonical order the
    // index of a two-mode state equals its mode-2 occupation.
    const CMatrix w = schwinger_beamsplitter_lift(photons, -theta);

    CMatrix raw = CMatrix::Zero(d, d);
    RankReport rank;
    rank.full_rank = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
    double residual_sq = 0.0;
    for (int harmonic = -photons; harmonic <= photons; ++harmonic) {
        const int first = std::max(0, -harmonic);
        const int last = std::min(photons, photons - harmonic);
        const int unknowns = last - first + 1;
        CMatrix a(d, unknowns);
        for (int nu = 0; nu < d; ++nu) {
            for (int k = 0; k < unknowns; ++k) {
                const int alpha = first + k;
                a(nu, k) = std::conj(w(alpha, nu)) * w(alpha + harmonic, nu);
            }
        }
        const CVector rhs = h.coefficients.row(harmonic + photons).transpose();
        Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) {
            throw NumericalError("reconstruct_m2: harmonic I=" + std::to_string(harmonic) +
                                 " is singular at theta=" + std::to_string(theta));
        }
        rank.rank += static_cast<std::size_t>(unknowns);
        rank.sigma_max = std::max(rank.sigma_max, sv(0));
        const CVector x = svd.solve(rhs);
        residual_sq += (a * x - rhs).squaredNorm();
        for (int k = 0; k < unknowns; ++k) raw(first + k, first + k + harmonic) = x(k);
    }
    // Parseval: the harmonic residual times 2N+1 is the residual over phases.
    const double residual = std::sqrt(residual_sq * (2 * photons + 1));
    DensityMatrix projected = project_to_density_matrix(FockBasis(photons, 2), raw);
    return Reconstruction{std::move(raw), std::move(projected), residual, rank};
}

} // namespace lotomo::m2
