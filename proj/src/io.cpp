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

#include "lotomo/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace lotomo::io {

namespace {

template <class T>
T require(const Json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key)) {
        throw ValidationError(std::string(what) + ": missing \"" + key + "\"");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string(what) + ": bad \"" + key + "\": " + e.what());
    }
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ValidationError("complex entries must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

Json matrix_to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array()) throw ValidationError("matrix rows must be arrays");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ValidationError("matrix rows must all have the same length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

Json config_to_json(const InterferometerConfig& config) {
    const Provenance& p = config.provenance();
    return Json{{"modes", config.modes()},
                {"rows", matrix_to_json(config.matrix())},
                {"provenance", {{"source", std::string(to_string(p.source))},
                                {"seed", p.seed},
                                {"index", p.index},
                                {"theta", p.theta}}}};
}

InterferometerConfig config_from_json(const Json& j) {
    const int modes = require<int>(j, "modes", "config");
    CMatrix g = matrix_from_json(j.contains("rows") ? j.at("rows") : Json());
    if (g.rows() != modes || g.cols() != modes) throw ValidationError("config: rows do not form a modes x modes matrix");
    Provenance p;
    if (j.contains("provenance")) {
        const Json& pj = j.at("provenance");
        p.source = config_source_from_string(require<std::string>(pj, "source", "config provenance"));
        if (pj.contains("seed")) p.seed = require<std::uint64_t>(pj, "seed", "config provenance");
        if (pj.contains("index")) p.index = require<int>(pj, "index", "config provenance");
        if (pj.contains("theta")) p.theta = require<double>(pj, "theta", "config provenance");
    }
    return InterferometerConfig(std::move(g), p);
}

Json state_to_json(const DensityMatrix& rho) {
    return Json{{"photons", rho.photons()}, {"modes", rho.modes()}, {"matrix", matrix_to_json(rho.matrix())}};
}

DensityMatrix state_from_json(const Json& j) {
    const int photons = require<int>(j, "photons", "state");
    const int modes = require<int>(j, "modes", "state");
    FockBasis basis(photons, modes);
    CMatrix m = matrix_from_json(j.contains("matrix") ? j.at("matrix") : Json());
    if (m.rows() != static_cast<Eigen::Index>(basis.size()) || m.cols() != m.rows()) {
        throw ValidationError("state: matrix is not D x D for the given photons and modes");
    }
    return DensityMatrix(std::move(basis), std::move(m));
}

Json mixture_to_json(const PhotonNumberMixture& mix) {
    Json components = Json::array();
    for (const auto& c : mix.components()) {
        components.push_back(
            {{"N", c.state.photons()}, {"weight", c.weight}, {"density_matrix", matrix_to_json(c.state.matrix())}});
    }
    return Json{{"modes", mix.modes()}, {"components", std::move(components)}};
}

PhotonNumberMixture mixture_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("components") || !j.at("components").is_array()) {
        throw ValidationError("mixture: missing \"components\" array");
    }
    std::optional<int> modes;
    if (j.contains("modes")) modes = require<int>(j, "modes", "mixture");
    std::vector<MixtureComponent> components;
    for (const Json& cj : j.at("components")) {
        const int n = require<int>(cj, "N", "mixture component");
        const double weight = require<double>(cj, "weight", "mixture component");
        CMatrix m = matrix_from_json(cj.contains("density_matrix") ? cj.at("density_matrix") : Json());
        int m_modes = 0;
        if (modes) {
            m_modes = *modes;
        } else {
            if (n == 0) throw ValidationError("mixture: \"modes\" is required when a component has N = 0");
            for (int k = 1; k <= static_cast<int>(m.rows()) + 1 && m_modes == 0; ++k) {
                if (fock_dimension(n, k) == static_cast<Count>(m.rows())) m_modes = k;
            }
            if (m_modes == 0) throw ValidationError("mixture: cannot infer the mode count from the matrix size");
        }
        components.push_back({weight, DensityMatrix(FockBasis(n, m_modes), std::move(m))});
    }
    return PhotonNumberMixture(std::move(components));
}

Json spec_to_json(const ExperimentSpec& s) {
    Json j{{"command", s.command},
           {"photons", s.photons},
           {"photons_max", s.photons_max},
           {"modes", s.modes},
           {"modes_max", s.modes_max},
           {"measured_modes", s.measured_modes},
           {"measured_modes_max", s.measured_modes_max},
           {"generator", s.generator},
           {"seed", s.seed},
           {"shots", s.shots},
           {"shot_sweep", s.shot_sweep},
           {"repeats", s.repeats},
           {"configs", s.configs},
           {"r_max", s.r_max},
           {"max_modes", s.max_modes},
           {"state_file", s.state_file},
           {"mixture_file", s.mixture_file},
           {"out", s.out},
           {"json_out", s.json_out}};
    j["rank_tolerance"] = s.rank_tolerance ? Json(*s.rank_tolerance) : Json(nullptr);
    j["detector_efficiency"] = s.detector_efficiency ? Json(*s.detector_efficiency) : Json(nullptr);
    return j;
}

ExperimentSpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("spec: expected a JSON object");
    static const char* known[] = {"command", "photons", "photons_max", "modes", "modes_max", "measured_modes",
                                  "measured_modes_max", "generator", "seed", "shots", "shot_sweep", "repeats", "configs", "r_max",
                                  "max_modes", "state_file", "mixture_file", "out", "json_out", "rank_tolerance",
                                  "detector_efficiency"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ValidationError("spec: unknown key \"" + key + "\"");
        }
    }
    ExperimentSpec s;
    auto opt = [&](const char* key, auto& field) {
        if (j.contains(key)) field = require<std::decay_t<decltype(field)>>(j, key, "spec");
    };
    s.command = require<std::string>(j, "command", "spec");
    opt("photons", s.photons);
    opt("photons_max", s.photons_max);
    opt("modes", s.modes);
    opt("modes_max", s.modes_max);
    opt("measured_modes", s.measured_modes);
    opt("measured_modes_max", s.measured_modes_max);
    opt("generator", s.generator);
    opt("seed", s.seed);
    opt("shots", s.shots);
    opt("shot_sweep", s.shot_sweep);
    opt("repeats", s.repeats);
    opt("configs", s.configs);
    opt("r_max", s.r_max);
    opt("max_modes", s.max_modes);
    opt("state_file", s.state_file);
    opt("mixture_file", s.mixture_file);
    opt("out", s.out);
    opt("json_out", s.json_out);
    if (j.contains("rank_tolerance") && !j.at("rank_tolerance").is_null()) {
        s.rank_tolerance = require<double>(j, "rank_tolerance", "spec");
    }
    if (j.contains("detector_efficiency") && !j.at("detector_efficiency").is_null()) {
        s.detector_efficiency = require<double>(j, "detector_efficiency", "spec");
    }
    return s;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::string name, std::vector<std::string> columns, int version)
    : out_(out), columns_(columns.size()) {
    out_ << schema_line(name, version) << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) throw ValidationError("CsvWriter: row width does not match the header");
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
    out_ << '\n';
    ++rows_;
}

std::string CsvWriter::schema_line(const std::string& name, int version) {
    return "# schema: lotomo." + name + ".v" + std::to_string(version);
}

} // namespace lotomo::io
