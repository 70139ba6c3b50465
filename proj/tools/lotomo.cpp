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

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "lotomo/analytic_m2.hpp"
#include "lotomo/combinatorics.hpp"
#include "lotomo/imperfections.hpp"
#include "lotomo/io.hpp"
#include "lotomo/kernels/kernels.hpp"
#include "lotomo/random.hpp"
#include "lotomo/selftest.hpp"
#include "lotomo/tomography.hpp"

namespace {

using namespace lotomo;
using io::CsvWriter;
using io::ExperimentSpec;
using io::Json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

int range_end(int start, int end) { return end == 0 ? start : end; }
int measured_or_modes(const ExperimentSpec& s) { return s.measured_modes == 0 ? s.modes : s.measured_modes; }

RankOptions rank_options(const ExperimentSpec& s) { return RankOptions{s.rank_tolerance}; }

std::string field(double x) { return io::format_double(x); }
std::string field(Count x) { return std::to_string(x); }
std::string field(int x) { return std::to_string(x); }
std::string field(bool x) { return x ? "true" : "false"; }

template <class F>
std::string or_overflow(F f) {
    try {
        return field(f());
    } catch (const OverflowError&) {
        return "overflow";
    }
}

void check_range(const char* name, int lo, int hi, int min) {
    if (lo < min) throw ValidationError(std::string(name) + " must be at least " + std::to_string(min));
    if (hi < lo) throw ValidationError(std::string(name) + " range is empty");
}

bool is_newton_young(const ExperimentSpec& s) { return s.generator == "newton-young"; }

void validate_generator(const ExperimentSpec& s) {
    if (is_newton_young(s)) {
        if (s.modes != 2 || measured_or_modes(s) != 2) {
            throw ValidationError("the newton-young generator needs M = M' = 2");
        }
        return;
    }
    (void)generator_from_string(s.generator);
}

/// Output sink: the --out file when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ValidationError("cannot write " + path);
        }
    }
    std::ostream& get() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

int cmd_bounds(const ExperimentSpec& s) {
    const int n_hi = range_end(s.photons, s.photons_max);
    const int m_hi = range_end(s.modes, s.modes_max);
    check_range("photons", s.photons, n_hi, 1);
    check_range("modes", s.modes, m_hi, 2);
    Sink sink(s.out);
    CsvWriter csv(sink.get(), "bounds",
                  {"N", "M", "M'", "D_NM", "R_NM", "R_NMM'", "feasible", "min_modes_lower_bound", "B_M_N", "B_M_2N",
                   "D_N_M2_squared"});
    for (int n = s.photons; n <= n_hi; ++n) {
        for (int m = s.modes; m <= m_hi; ++m) {
            const int mp_lo = std::max(m, s.measured_modes);
            const int mp_hi = s.measured_modes_max == 0 ? mp_lo : s.measured_modes_max;
            if (mp_hi < mp_lo) throw ValidationError("measured-modes range is empty");
            for (int mp = mp_lo; mp <= mp_hi; ++mp) {
                csv.row({field(n), field(m), field(mp), or_overflow([&] { return fock_dimension(n, m); }),
                         or_overflow([&] { return min_configs(n, m); }),
                         or_overflow([&] { return min_configs_extended(n, m, mp); }),
                         or_overflow([&] { return single_config_feasible(n, m, mp); }),
                         or_overflow([&] { return min_modes_lower_bound(n, m); }),
                         or_overflow([&] { return design_size_sum(m, n); }),
                         or_overflow([&] { return design_size_sum(m, 2 * n); }),
                         or_overflow([&] { return design_size_bounds(m, n).theorem1_bound; })});
            }
        }
    }
    return kExitOk;
}

/// Residual of an exact-data reconstruction of a seeded probe state.
double probe_residual(std::span<const InterferometerConfig> cfgs, int n, int m, std::uint64_t seed,
                      const RankOptions& options) {
    const DensityMatrix probe = random_density_matrix(n, m, derive_seed(seed, 0x70b3));
    const Superoperator l = build_superoperator(cfgs, n, m);
    return reconstruct(l, simulate_records(probe, cfgs, 0, 0), options).residual;
}

int cmd_rank_scan(const ExperimentSpec& s) {
    validate_generator(s);
    check_range("photons", s.photons, s.photons, 1);
    check_range("modes", s.modes, s.modes, 2);
    const int mp = measured_or_modes(s);
    if (mp < s.modes) throw ValidationError("M' must be at least M");
    const RankOptions options = rank_options(s);
    const Count bound = min_configs_extended(s.photons, s.modes, mp);

    std::vector<InterferometerConfig> cfgs;
    std::vector<std::size_t> trace;
    std::size_t full_rank = 0;
    bool found = false;
    if (is_newton_young(s)) {
        const double theta = m2::choose_theta(s.photons);
        cfgs = m2::newton_young_configs(s.photons, theta);
        for (std::size_t r = 1; r <= cfgs.size(); ++r) {
            const auto report = gramian_rank(build_superoperator(std::span(cfgs).first(r), s.photons, s.modes), options);
            trace.push_back(report.rank);
            full_rank = report.full_rank;
        }
        found = trace.back() == full_rank;
    } else {
        const std::size_t r_max = s.r_max != 0 ? s.r_max : static_cast<std::size_t>(2 * bound + 4);
        MinConfigsResult res = find_min_configs(s.photons, s.modes, mp, generator_from_string(s.generator), s.seed,
                                                r_max, options);
        cfgs = std::move(res.configs);
        trace = std::move(res.rank_trace);
        full_rank = res.full_rank;
        found = res.found;
    }

    Sink sink(s.out);
    CsvWriter csv(sink.get(), "rank_scan", {"N", "M", "M'", "generator", "seed", "R", "rank", "complete", "residual"});
    for (std::size_t r = 1; r <= trace.size(); ++r) {
        const bool complete = trace[r - 1] == full_rank;
        const std::string residual =
            complete ? field(probe_residual(std::span(cfgs).first(r), s.photons, s.modes, s.seed, options)) : "";
        csv.row({field(s.photons), field(s.modes), field(mp), s.generator, std::to_string(s.seed), field(r),
                 field(trace[r - 1]), field(complete), residual});
    }
    if (!s.json_out.empty()) {
        Json doc{{"spec", io::spec_to_json(s)},
                 {"found", found},
                 {"configs_used", trace.size()},
                 {"counting_bound", bound},
                 {"full_rank", full_rank},
                 {"rank_trace", trace},
                 {"configs", Json::array()}};
        for (const auto& c : cfgs) doc["configs"].push_back(io::config_to_json(c));
        io::write_text(s.json_out, doc.dump(2) + "\n");
    }
    if (found) {
        const long long gap = static_cast<long long>(trace.size()) - static_cast<long long>(bound);
        std::cerr << "minimal R = " << trace.size() << ", counting bound = " << bound << ", gap = " << gap << '\n';
    } else {
        std::cerr << "not complete after " << trace.size() << " configurations (rank " << trace.back() << " of "
                  << full_rank << "), counting bound = " << bound << '\n';
    }
    return found ? kExitOk : kExitNumerical;
}

int cmd_min_modes(const ExperimentSpec& s) {
    const Generator gen = generator_from_string(s.generator);
    const int n_hi = range_end(s.photons, s.photons_max);
    const int m_hi = range_end(s.modes, s.modes_max);
    check_range("photons", s.photons, n_hi, 1);
    check_range("modes", s.modes, m_hi, 2);
    Sink sink(s.out);
    CsvWriter csv(sink.get(), "min_modes", {"N", "M", "generator", "seed", "b", "n", "found"});
    bool all_found = true;
    for (int m = s.modes; m <= m_hi; ++m) {
        for (int n = s.photons; n <= n_hi; ++n) {
            const int lb = min_modes_lower_bound(n, m);
            const int cap = s.max_modes != 0 ? s.max_modes : lb + 4;
            const MinModesResult res = find_min_modes(n, m, gen, s.seed, cap, rank_options(s));
            all_found = all_found && res.found;
            csv.row({field(n), field(m), s.generator, std::to_string(s.seed), field(res.lower_bound),
                     res.found ? field(res.measured_modes) : "", field(res.found)});
            if (!res.found) std::cerr << "N=" << n << " M=" << m << ": no complete configuration up to M'=" << cap << '\n';
        }
    }
    return all_found ? kExitOk : kExitNumerical;
}

std::vector<InterferometerConfig> reconstruction_configs(const ExperimentSpec& s, int n) {
    if (is_newton_young(s)) return m2::newton_young_configs(n, m2::choose_theta(n));
    const Generator gen = generator_from_string(s.generator);
    const int mp = measured_or_modes(s);
    const std::size_t r = s.configs != 0 ? s.configs : static_cast<std::size_t>(min_configs_extended(n, s.modes, mp));
    std::vector<InterferometerConfig> cfgs;
    for (std::size_t j = 0; j < r; ++j) cfgs.push_back(generate_config_in_run(gen, mp, s.seed, j));
    return cfgs;
}

Json reconstruction_json(const Reconstruction& rec, const CMatrix* truth) {
    Json j{{"rank", rec.rank.rank},
           {"full_rank", rec.rank.full_rank},
           {"residual", rec.residual},
           {"raw", io::matrix_to_json(rec.raw)},
           {"projected", io::matrix_to_json(rec.projected.matrix())}};
    if (truth) {
        j["trace_distance_raw"] = trace_distance(rec.raw, *truth);
        j["trace_distance_projected"] = trace_distance(rec.projected.matrix(), *truth);
    }
    return j;
}

int reconstruct_state(const ExperimentSpec& s) {
    const DensityMatrix truth = io::state_from_json(io::read_json(s.state_file));
    ExperimentSpec eff = s;
    eff.photons = truth.photons();
    eff.modes = truth.modes();
    validate_generator(eff);
    const int n = truth.photons();
    const auto cfgs = reconstruction_configs(eff, n);
    const Superoperator l = build_superoperator(cfgs, n, eff.modes);
    const RankOptions options = rank_options(eff);

    Sink sink(s.out);
    if (!s.shot_sweep.empty()) {
        CsvWriter csv(sink.get(), "error_vs_shots", {"shots", "seed", "trace_distance_raw", "trace_distance_projected",
                                                     "residual"});
        for (std::uint64_t shots : s.shot_sweep) {
            if (shots == 0) throw ValidationError("shot-sweep entries must be positive");
            for (int rep = 0; rep < std::max(1, s.repeats); ++rep) {
                const std::uint64_t seed = derive_seed(s.seed, static_cast<std::uint64_t>(rep));
                const auto records = simulate_records(truth, cfgs, shots, seed);
                const Reconstruction rec = reconstruct(l, records, options);
                csv.row({std::to_string(shots), std::to_string(seed), field(trace_distance(rec.raw, truth.matrix())),
                         field(trace_distance(rec.projected.matrix(), truth.matrix())), field(rec.residual)});
            }
        }
        return kExitOk;
    }

    const auto records = simulate_records(truth, cfgs, s.shots, derive_seed(s.seed, 0));
    const Reconstruction rec = reconstruct(l, records, options);
    Json out{{"spec", io::spec_to_json(s)}, {"configs", Json::array()}};
    for (const auto& c : cfgs) out["configs"].push_back(io::config_to_json(c));
    out["estimate"] = reconstruction_json(rec, &truth.matrix());
    sink.get() << out.dump(2) << '\n';
    return kExitOk;
}

int reconstruct_mixture_file(const ExperimentSpec& s) {
    const PhotonNumberMixture mix = io::mixture_from_json(io::read_json(s.mixture_file));
    ExperimentSpec eff = s;
    eff.modes = mix.modes();
    validate_generator(eff);
    const int n_max = mix.max_photons();
    const int mp = measured_or_modes(eff);
    int n_worst = 1;
    for (int n = 1; n <= n_max; ++n) {
        if (min_configs_extended(n, eff.modes, mp) >= min_configs_extended(n_worst, eff.modes, mp)) n_worst = n;
    }
    const auto cfgs = reconstruction_configs(eff, n_worst);
    const TruncatedBasis space(mp, n_max);
    std::optional<DetectorModel> detector;
    if (s.detector_efficiency) detector = DetectorModel::uniform(mp, *s.detector_efficiency);

    std::vector<MeasurementRecord> records;
    for (std::size_t j = 0; j < cfgs.size(); ++j) {
        RVector p = joint_distribution(mix, cfgs[j], space);
        if (detector) p = detector_response(space, p, *detector);
        if (s.shots > 0) {
            MeasurementRecord r = MeasurementRecord::from_counts(j, sample_shots(p, s.shots, derive_seed(s.seed, j)));
            records.push_back(std::move(r));
        } else {
            records.push_back(MeasurementRecord::exact(j, std::move(p)));
        }
    }
    const MixtureEstimate est = reconstruct_mixture(records, cfgs, eff.modes, n_max, detector, rank_options(eff));

    Json out{{"spec", io::spec_to_json(s)}, {"configs", Json::array()}, {"sectors", Json::array()}};
    for (const auto& c : cfgs) out["configs"].push_back(io::config_to_json(c));
    for (const auto& [n, weight] : est.weights) {
        Json sector{{"N", n}, {"weight", weight}};
        for (const auto& c : mix.components()) {
            if (c.state.photons() == n) sector["true_weight"] = c.weight;
        }
        if (auto it = est.states.find(n); it != est.states.end()) {
            const CMatrix* truth = nullptr;
            for (const auto& c : mix.components()) {
                if (c.state.photons() == n) truth = &c.state.matrix();
            }
            sector["estimate"] = reconstruction_json(it->second, truth);
        }
        out["sectors"].push_back(std::move(sector));
    }
    Sink sink(s.out);
    sink.get() << out.dump(2) << '\n';
    return kExitOk;
}

int cmd_reconstruct(const ExperimentSpec& s) {
    if (s.state_file.empty() == s.mixture_file.empty()) {
        throw ValidationError("reconstruct needs exactly one of --state or --mixture");
    }
    return s.state_file.empty() ? reconstruct_mixture_file(s) : reconstruct_state(s);
}

int cmd_selftest(const ExperimentSpec& s) {
    const selftest::Report report = selftest::run_all();
    Sink sink(s.out);
    for (const auto& c : report.checks) {
        sink.get() << (c.passed ? "PASS " : "FAIL ") << c.id() << "  " << c.detail << '\n';
    }
    const auto failures = report.failures();
    sink.get() << report.checks.size() - failures.size() << "/" << report.checks.size() << " checks passed\n";
    return failures.empty() ? kExitOk : kExitFailed;
}

int cmd_random_state(const ExperimentSpec& s, int rank) {
    const DensityMatrix rho = random_density_matrix(s.photons, s.modes, s.seed, rank);
    Sink sink(s.out);
    sink.get() << io::state_to_json(rho).dump(2) << '\n';
    return kExitOk;
}

int execute(const ExperimentSpec& s) {
    if (s.command == "bounds") return cmd_bounds(s);
    if (s.command == "rank-scan") return cmd_rank_scan(s);
    if (s.command == "min-modes") return cmd_min_modes(s);
    if (s.command == "reconstruct") return cmd_reconstruct(s);
    if (s.command == "selftest") return cmd_selftest(s);
    throw ValidationError("unknown command \"" + s.command + "\"");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiphoton linear-optics tomography experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    ExperimentSpec spec;
    double tolerance = 0.0;
    double efficiency = 0.0;
    std::string kernel = "auto";
    std::string spec_file;
    std::string save_spec;

    app.add_option("--seed", spec.seed, "Base seed")->capture_default_str();
    app.add_option("--tolerance-rank", tolerance, "Relative singular-value threshold for the numerical rank");
    app.add_option("--shots", spec.shots, "Shots per configuration (0 = exact probabilities)")->capture_default_str();
    app.add_option("--out", spec.out, "Output file (stdout when omitted)");
    app.add_option("--kernel", kernel, "Permanent kernel: auto, scalar, avx2 or neon")->capture_default_str();
    app.add_option("--save-spec", save_spec, "Also write the resolved run spec as JSON");

    auto add_problem = [&](CLI::App* sub) {
        sub->add_option("-N,--photons", spec.photons, "Photon number")->capture_default_str();
        sub->add_option("-M,--modes", spec.modes, "Input modes")->capture_default_str();
        sub->add_option("--measured-modes", spec.measured_modes, "Measured modes M' (default M)");
    };

    auto* bounds = app.add_subcommand("bounds", "Counting bounds and design sizes");
    add_problem(bounds);
    bounds->add_option("--photons-max", spec.photons_max, "Last N of the range");
    bounds->add_option("--modes-max", spec.modes_max, "Last M of the range");
    bounds->add_option("--measured-modes-max", spec.measured_modes_max, "Last M' of the range");

    auto* rank_scan = app.add_subcommand("rank-scan", "Append configurations until the Gramian is full rank");
    add_problem(rank_scan);
    rank_scan->add_option("--generator", spec.generator, "haar, mesh or newton-young")->capture_default_str();
    rank_scan->add_option("--r-max", spec.r_max, "Give up after this many configurations");
    rank_scan->add_option("--json", spec.json_out, "Write the result and config provenance as JSON");

    auto* min_modes = app.add_subcommand("min-modes", "Smallest M' that a single configuration completes");
    add_problem(min_modes);
    min_modes->add_option("--photons-max", spec.photons_max, "Last N of the range");
    min_modes->add_option("--modes-max", spec.modes_max, "Last M of the range");
    min_modes->add_option("--generator", spec.generator, "haar or mesh")->capture_default_str();
    min_modes->add_option("--max-modes", spec.max_modes, "Largest M' to try");

    auto* recon = app.add_subcommand("reconstruct", "Simulate measurements of a state and invert them");
    recon->add_option("--state", spec.state_file, "State JSON file");
    recon->add_option("--mixture", spec.mixture_file, "Mixture JSON file");
    recon->add_option("--measured-modes", spec.measured_modes, "Measured modes M' (default M)");
    recon->add_option("--generator", spec.generator, "haar, mesh or newton-young")->capture_default_str();
    recon->add_option("--configs", spec.configs, "Number of configurations (default: counting bound)");
    recon->add_option("--shot-sweep", spec.shot_sweep, "Shot counts for an error-vs-shots table");
    recon->add_option("--repeats", spec.repeats, "Seeds per shot count in a sweep")->capture_default_str();
    recon->add_option("--detector-efficiency", efficiency, "Uniform detector efficiency (mixtures)");

    int state_rank = 0;
    auto* random_state = app.add_subcommand("random-state", "Write a seeded random density matrix as state JSON");
    random_state->add_option("-N,--photons", spec.photons, "Photon number")->capture_default_str();
    random_state->add_option("-M,--modes", spec.modes, "Modes")->capture_default_str();
    random_state->add_option("--rank", state_rank, "Rank (0 = full)")->capture_default_str();

    app.add_subcommand("selftest", "Run the invariant suites");

    auto* run = app.add_subcommand("run", "Execute a serialized run spec");
    run->add_option("--spec", spec_file, "Spec JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (kernel != "auto") kernels::select(kernel == "scalar" ? kernels::Isa::scalar
                                              : kernel == "avx2" ? kernels::Isa::avx2
                                              : kernel == "neon" ? kernels::Isa::neon
                                                                 : throw ValidationError("unknown kernel " + kernel));
        if (*run) {
            // Global flags given explicitly win over the file.
            ExperimentSpec loaded = io::spec_from_json(io::read_json(spec_file));
            if (app.count("--seed")) loaded.seed = spec.seed;
            if (app.count("--shots")) loaded.shots = spec.shots;
            if (app.count("--out")) loaded.out = spec.out;
            spec = std::move(loaded);
        } else {
            spec.command = app.get_subcommands().front()->get_name();
            if (recon->count("--detector-efficiency")) spec.detector_efficiency = efficiency;
        }
        if (app.count("--tolerance-rank")) spec.rank_tolerance = tolerance;
        if (*random_state) return cmd_random_state(spec, state_rank);
        if (!save_spec.empty()) io::write_text(save_spec, io::spec_to_json(spec).dump(2) + "\n");
        return execute(spec);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}
