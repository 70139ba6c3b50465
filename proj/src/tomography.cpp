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

#include "lotomo/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "lotomo/kernels/kernels.hpp"
#include "lotomo/random.hpp"

namespace lotomo {

DensityMatrix::DensityMatrix(FockBasis basis, CMatrix matrix) : basis_(std::move(basis)), matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(basis_.size());
    if (matrix_.rows() != d || matrix_.cols() != d) {
        throw ValidationError("DensityMatrix: matrix size does not match the basis dimension");
    }
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm <= kHermitianTolerance)) {
        throw ValidationError("DensityMatrix: not Hermitian (deviation " + std::to_string(herm) + ")");
    }
    const Complex tr = matrix_.trace();
    if (!(std::abs(tr - 1.0) <= kTraceTolerance)) {
        throw ValidationError("DensityMatrix: trace is " + std::to_string(tr.real()) + ", expected 1");
    }
    const CMatrix h = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kEigenvalueFloor) {
        throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    }
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
    const CMatrix d = a - b;
    const CMatrix h = 0.5 * (d + d.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityMatrix random_density_matrix(int photons, int modes, std::uint64_t seed, int rank) {
    FockBasis basis(photons, modes);
    const auto d = static_cast<Eigen::Index>(basis.size());
    const Eigen::Index k = (rank <= 0) ? d : std::min<Eigen::Index>(rank, d);
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix g(d, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    CMatrix rho = g * g.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityMatrix(std::move(basis), std::move(rho));
}

DensityMatrix fock_projector(const FockBasis& basis, std::span<const int> occupation) {
    const auto i = static_cast<Eigen::Index>(basis.index_of(occupation));
    const auto d = static_cast<Eigen::Index>(basis.size());
    CMatrix rho = CMatrix::Zero(d, d);
    rho(i, i) = 1.0;
    return DensityMatrix(basis, std::move(rho));
}

DensityMatrix maximally_mixed(const FockBasis& basis) {
    const auto d = static_cast<Eigen::Index>(basis.size());
    return DensityMatrix(basis, CMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix pure_state(const FockBasis& basis, const CVector& amplitudes) {
    if (amplitudes.size() != static_cast<Eigen::Index>(basis.size())) {
        throw ValidationError("pure_state: amplitude count does not match the basis");
    }
    const double norm = amplitudes.norm();
    if (!(norm > 0.0)) throw ValidationError("pure_state: zero vector");
    const CVector psi = amplitudes / norm;
    CMatrix rho = psi * psi.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(basis, std::move(rho));
}

DensityMatrix project_to_density_matrix(const FockBasis& basis, const CMatrix& estimate) {
    CMatrix h = 0.5 * (estimate + estimate.adjoint());
    const double tr = h.trace().real();
    if (!(tr > 0.0)) throw NumericalError("project_to_density_matrix: estimate has non-positive trace");
    h /= tr;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    RVector w = es.eigenvalues().cwiseMax(0.0);
    const double total = w.sum();
    if (!(total > 0.0)) throw NumericalError("project_to_density_matrix: no positive spectrum left");
    w /= total;
    CMatrix rho = es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    // Re-pin the trace after the final symmetrization.
    rho /= rho.trace().real();
    return DensityMatrix(basis, std::move(rho));
}

namespace {

std::vector<Occupation> padded_inputs(const FockBasis& input, int measured_modes) {
    std::vector<Occupation> out;
    out.reserve(input.size());
    for (const auto& s : input.states()) out.push_back(pad_with_vacuum(s, measured_modes));
    return out;
}

// <alpha|U(g)|nu'> for vacuum-padded inputs alpha and all outputs nu'.
CMatrix input_amplitudes(const InterferometerConfig& config, const FockBasis& input, const FockBasis& output) {
    return lift_rows(config.matrix(), padded_inputs(input, config.modes()), output);
}

void append_block(RowMajorCMatrix& l, Eigen::Index first_row, const CMatrix& amps) {
    const auto d = amps.rows();
    const auto& kernel = kernels::active();
    CVector column(d);
    for (Eigen::Index nu = 0; nu < amps.cols(); ++nu) {
        column = amps.col(nu);
        kernel.conj_outer(std::span<const Complex>(column.data(), static_cast<std::size_t>(d)),
                          std::span<Complex>(l.row(first_row + nu).data(), static_cast<std::size_t>(d * d)));
    }
}

RankReport rank_from_singular_values(const RVector& sv, std::size_t rows, std::size_t cols,
                                     const RankOptions& options) {
    RankReport r;
    r.full_rank = cols;
    if (sv.size() == 0) return r;
    r.sigma_max = sv(0);
    const double rel = options.relative_tolerance.value_or(static_cast<double>(std::max(rows, cols)) *
                                                           std::numeric_limits<double>::epsilon());
    r.tolerance = rel * r.sigma_max;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > r.tolerance) {
            ++r.rank;
            r.smallest_retained = sv(i);
        } else {
            r.largest_discarded = std::max(r.largest_discarded, sv(i));
        }
    }
    return r;
}

RankReport rank_of(const RowMajorCMatrix& l, const RankOptions& options) {
    Eigen::BDCSVD<CMatrix> svd{CMatrix(l)};
    return rank_from_singular_values(svd.singularValues(), static_cast<std::size_t>(l.rows()),
                                     static_cast<std::size_t>(l.cols()), options);
}

} // namespace

RVector outcome_probabilities(const DensityMatrix& rho, const InterferometerConfig& config) {
    if (config.modes() < rho.modes()) {
        throw ValidationError("outcome_probabilities: configuration has fewer modes than the state");
    }
    const FockBasis output(rho.photons(), config.modes());
    const CMatrix v = input_amplitudes(config, rho.basis(), output);
    const CMatrix w = rho.matrix() * v;
    RVector p(v.cols());
    for (Eigen::Index nu = 0; nu < v.cols(); ++nu) {
        p(nu) = v.col(nu).dot(w.col(nu)).real(); // dot() conjugates its left operand
        if (p(nu) < -1e-12) {
            throw NumericalError("outcome_probabilities: probability " + std::to_string(p(nu)) +
                                 " is negative beyond round-off");
        }
    }
    return p;
}

CVector flatten(const CMatrix& rho) {
    const auto d = rho.rows();
    CVector out(d * d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) out(a * d + b) = rho(a, b);
    }
    return out;
}

CMatrix unflatten(const CVector& flat, std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    if (flat.size() != d * d) throw ValidationError("unflatten: length is not dim^2");
    CMatrix out(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) out(a, b) = flat(a * d + b);
    }
    return out;
}

Superoperator build_superoperator(std::span<const InterferometerConfig> configs, int photons, int modes) {
    if (configs.empty()) throw ValidationError("build_superoperator: no configurations");
    const int measured = configs.front().modes();
    for (const auto& c : configs) {
        if (c.modes() != measured) throw ValidationError("build_superoperator: configurations disagree on the mode count");
    }
    if (measured < modes) throw ValidationError("build_superoperator: configurations have fewer modes than the state");

    Superoperator l{FockBasis(photons, modes), FockBasis(photons, measured), configs.size(), {}};
    const auto d = static_cast<Eigen::Index>(l.input_basis.size());
    const auto dp = static_cast<Eigen::Index>(l.output_basis.size());
    l.matrix.resize(static_cast<Eigen::Index>(configs.size()) * dp, d * d);
    for (std::size_t j = 0; j < configs.size(); ++j) {
        append_block(l.matrix, static_cast<Eigen::Index>(j) * dp,
                     input_amplitudes(configs[j], l.input_basis, l.output_basis));
    }
    return l;
}

RankReport gramian_rank(const Superoperator& l, const RankOptions& options) {
    if (l.matrix.size() == 0) throw ValidationError("gramian_rank: empty superoperator");
    return rank_of(l.matrix, options);
}

bool is_complete(std::span<const InterferometerConfig> configs, int photons, int modes, const RankOptions& options) {
    return gramian_rank(build_superoperator(configs, photons, modes), options).complete();
}

RVector MeasurementRecord::frequencies() const {
    if (!sampled()) return probabilities;
    RVector f(static_cast<Eigen::Index>(counts.size()));
    const double s = shots > 0 ? static_cast<double>(shots) : 1.0;
    for (std::size_t i = 0; i < counts.size(); ++i) f(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]) / s;
    return f;
}

MeasurementRecord MeasurementRecord::exact(std::size_t config_index, RVector probabilities) {
    if (probabilities.size() > 0 && probabilities.minCoeff() < -1e-12) {
        throw ValidationError("MeasurementRecord: negative probability");
    }
    if (probabilities.sum() > 1.0 + 1e-10) {
        throw ValidationError("MeasurementRecord: probabilities sum above one");
    }
    MeasurementRecord r;
    r.config_index = config_index;
    r.probabilities = std::move(probabilities);
    return r;
}

MeasurementRecord MeasurementRecord::from_counts(std::size_t config_index, std::vector<std::uint64_t> counts) {
    MeasurementRecord r;
    r.config_index = config_index;
    for (auto c : counts) r.shots += c;
    r.counts = std::move(counts);
    return r;
}

RankDeficientError::RankDeficientError(std::size_t rank, std::size_t required)
    : NumericalError("configurations are not tomographically complete: rank " + std::to_string(rank) + " of " +
                     std::to_string(required) + " (deficit " + std::to_string(required - rank) + ")"),
      rank_(rank), required_(required) {}

Reconstruction reconstruct(const Superoperator& l, std::span<const MeasurementRecord> records, const RankOptions& options) {
    if (records.size() != l.config_count) {
        throw ValidationError("reconstruct: expected " + std::to_string(l.config_count) + " records, got " +
                              std::to_string(records.size()));
    }
    const auto dp = static_cast<Eigen::Index>(l.outcomes_per_config());
    CVector p(l.matrix.rows());
    for (std::size_t j = 0; j < records.size(); ++j) {
        if (records[j].config_index != j) {
            throw ValidationError("reconstruct: record " + std::to_string(j) + " belongs to configuration " +
                                  std::to_string(records[j].config_index));
        }
        const RVector f = records[j].frequencies();
        if (f.size() != dp) throw ValidationError("reconstruct: record length does not match the outcome space");
        p.segment(static_cast<Eigen::Index>(j) * dp, dp) = f.cast<Complex>();
    }

    const CMatrix lm(l.matrix);
    Eigen::BDCSVD<CMatrix> svd(lm, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RankReport rank = rank_from_singular_values(svd.singularValues(), static_cast<std::size_t>(lm.rows()),
                                                      static_cast<std::size_t>(lm.cols()), options);
    if (!rank.complete()) throw RankDeficientError(rank.rank, rank.full_rank);

    const auto k = static_cast<Eigen::Index>(rank.rank);
    CVector coeff = svd.matrixU().leftCols(k).adjoint() * p;
    coeff.array() /= svd.singularValues().head(k).cast<Complex>().array();
    const CVector x = svd.matrixV().leftCols(k) * coeff;

    CMatrix raw = unflatten(x, l.input_basis.size());
    const double residual = (lm * x - p).norm();
    DensityMatrix projected = project_to_density_matrix(l.input_basis, raw);
    return Reconstruction{std::move(raw), std::move(projected), residual, rank};
}

std::string_view to_string(Generator g) { return g == Generator::haar ? "haar" : "mesh"; }

Generator generator_from_string(std::string_view name) {
    if (name == "haar") return Generator::haar;
    if (name == "mesh") return Generator::mesh;
    throw ValidationError("unknown generator '" + std::string(name) + "' (expected haar or mesh)");
}

InterferometerConfig generate_config(Generator generator, int modes, std::uint64_t seed) {
    return generator == Generator::haar ? haar_random_unitary(modes, seed) : random_mesh_unitary(modes, seed);
}

InterferometerConfig generate_config_in_run(Generator generator, int modes, std::uint64_t seed, std::size_t j) {
    return generate_config(generator, modes, derive_seed(seed, j));
}

MinConfigsResult find_min_configs(int photons, int modes, int measured_modes, Generator generator,
                                  std::uint64_t seed, std::size_t r_max, const RankOptions& options) {
    if (r_max == 0) throw ValidationError("find_min_configs: r_max must be positive");
    MinConfigsResult res;
    res.photons = photons;
    res.modes = modes;
    res.measured_modes = measured_modes;
    res.generator = generator;
    res.seed = seed;
    res.lower_bound = min_configs_extended(photons, modes, measured_modes); // validates N, M, M'

    const FockBasis input(photons, modes);
    const FockBasis output(photons, measured_modes);
    const auto d = static_cast<Eigen::Index>(input.size());
    const auto dp = static_cast<Eigen::Index>(output.size());
    res.full_rank = input.size() * input.size();

    RowMajorCMatrix l(0, d * d);
    for (std::size_t j = 0; j < r_max; ++j) {
        InterferometerConfig g = generate_config_in_run(generator, measured_modes, seed, j);
        const Eigen::Index first = l.rows();
        l.conservativeResize(first + dp, Eigen::NoChange);
        append_block(l, first, input_amplitudes(g, input, output));
        res.configs.push_back(std::move(g));

        const RankReport r = rank_of(l, options);
        res.rank_trace.push_back(r.rank);
        res.best_rank = std::max(res.best_rank, r.rank);
        if (r.complete()) {
            res.found = true;
            res.configs_used = j + 1;
            return res;
        }
    }
    res.configs_used = r_max;
    return res;
}

MinModesResult find_min_modes(int photons, int modes, Generator generator, std::uint64_t seed, int max_modes,
                              const RankOptions& options) {
    MinModesResult res;
    res.photons = photons;
    res.modes = modes;
    res.lower_bound = min_modes_lower_bound(photons, modes);
    for (int mp = modes; mp <= max_modes; ++mp) {
        const InterferometerConfig g = generate_config(generator, mp, derive_seed(seed, static_cast<std::uint64_t>(mp)));
        const std::vector<InterferometerConfig> single{g};
        const RankReport r = gramian_rank(build_superoperator(single, photons, modes), options);
        res.trace.emplace_back(mp, r.rank);
        if (r.complete()) {
            res.found = true;
            res.measured_modes = mp;
            return res;
        }
    }
    return res;
}

std::vector<std::uint64_t> sample_shots(const RVector& p, std::uint64_t shots, std::uint64_t seed) {
    if (p.size() == 0) throw ValidationError("sample_shots: empty distribution");
    if (p.minCoeff() < -1e-12) throw ValidationError("sample_shots: negative probability");
    if (std::abs(p.sum() - 1.0) > 1e-9) throw ValidationError("sample_shots: probabilities do not sum to one");
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(p.size()), 0);
    Rng rng(seed);
    std::uint64_t left = shots;
    double mass = 1.0;
    // Sequential conditional binomials give an exact multinomial draw.
    for (Eigen::Index i = 0; i + 1 < p.size() && left > 0; ++i) {
        const double pi = std::max(p(i), 0.0);
        const double q = mass > 0.0 ? std::clamp(pi / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::uint64_t> draw(left, q);
        const std::uint64_t k = draw(rng);
        counts[static_cast<std::size_t>(i)] = k;
        left -= k;
        mass -= pi;
    }
    counts.back() += left;
    return counts;
}

std::vector<MeasurementRecord> simulate_records(const DensityMatrix& rho, std::span<const InterferometerConfig> configs,
                                                std::uint64_t shots, std::uint64_t seed) {
    std::vector<MeasurementRecord> out;
    out.reserve(configs.size());
    for (std::size_t j = 0; j < configs.size(); ++j) {
        RVector p = outcome_probabilities(rho, configs[j]);
        if (shots == 0) {
            out.push_back(MeasurementRecord::exact(j, std::move(p)));
        } else {
            out.push_back(MeasurementRecord::from_counts(j, sample_shots(p, shots, derive_seed(seed, j))));
        }
    }
    return out;
}

} // namespace lotomo
