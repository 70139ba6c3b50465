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

// Closed-form two-mode protocol: 2N+1 configurations made of equally spaced
// phase shifts and one fixed beamsplitter, with reconstruction by Fourier
// harmonics. Beamsplitters map to spin rotations through the Schwinger
// correspondence |n1, n2> <-> |S = N/2, m = (n1 - n2)/2>.

#include <span>
#include <vector>

#include "lotomo/linear_optics.hpp"
#include "lotomo/tomography.hpp"
#include "lotomo/types.hpp"

namespace lotomo::m2 {

/// Wigner small-d element d^j_{m1,m2}(beta) = <j m1| exp(-i beta J_y) |j m2>.
/// Quantum numbers are passed doubled so half-integers stay exact.
double wigner_small_d(int two_j, int two_m1, int two_m2, double beta);

/// Full (2j+1)-square d^j(beta), rows and columns ordered m = j, j-1, ..., -j.
Eigen::MatrixXd wigner_small_d_matrix(int two_j, double beta);

/// exp(theta (a1^dag a2 - a2^dag a1)) as a mode matrix: [[c, s], [-s, c]].
CMatrix beamsplitter(double theta);

/// exp(i phi a2^dag a2) as a mode matrix: diag(1, e^{i phi}).
CMatrix phase_shift(double phi);

/// Sign s for which lift(beamsplitter(theta), N) = d^{N/2}(s * 2 theta). The
/// value is fixed in code; calibrate_schwinger_sign() re-derives it from the
/// one-photon lift.
inline constexpr int kSchwingerAngleSign = -1;
int calibrate_schwinger_sign();

/// d^{N/2}(kSchwingerAngleSign * 2 theta): the Fock lift of the real
/// beamsplitter at photon number N, evaluated without permanents.
CMatrix schwinger_beamsplitter_lift(int photons, double theta);

/// min over integer l <= N and |m| <= l of |d^l_{m,0}(2 theta)|. Harmonic
/// I = m of the data only sees multipoles of order l >= |m|, each scaled by
/// d^l_{m,0}; a zero here makes that harmonic's linear system singular.
double admissibility(int photons, double theta);

inline constexpr double kAdmissibilityFloor = 1e-3;
inline constexpr int kThetaGridPoints = 1024;

/// Beamsplitter angle maximizing admissibility over a fixed grid of rotation
/// angles 2 theta in (0, pi).
double choose_theta(int photons);

/// Phases 2 pi j / (2N + 1), j = 0..2N.
std::vector<double> newton_young_phases(int photons);

/// The 2N+1 configurations. Outcome probabilities are diag(U^dag rho U), so
/// the stored matrix is phase_shift(phi_j) * beamsplitter(theta)^T: the state
/// sees a phase shift of -phi_j on mode 2 and then beamsplitter(theta).
/// Harmonic I then couples exactly the entries <n1,n2|rho|n1',n2'> with
/// n2' - n2 = I.
std::vector<InterferometerConfig> newton_young_configs(int photons, double theta);

/// Discrete Fourier coefficients over the phase index. Row I + N holds
/// harmonic I = -N..N; columns are outcomes.
struct Harmonics {
    int photons = 0;
    CMatrix coefficients;

    Complex at(int harmonic, Eigen::Index outcome) const { return coefficients(harmonic + photons, outcome); }
};

Harmonics dft_harmonics(std::span<const RVector> data, int photons);
Harmonics dft_harmonics(std::span<const MeasurementRecord> records, int photons);

/// Per-harmonic least-squares inversion of Newton-Young data. Throws
/// NumericalError naming the harmonic when its system is singular.
Reconstruction reconstruct_m2(std::span<const MeasurementRecord> records, int photons, double theta);

} // namespace lotomo::m2
