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

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lotomo/imperfections.hpp"
#include "lotomo/linear_optics.hpp"
#include "lotomo/tomography.hpp"

namespace lotomo::io {

using Json = nlohmann::json;

/// Complex matrices are arrays of rows, each entry a [re, im] pair.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

/// {"modes", "rows", "provenance": {"source", "seed", "index", "theta"}}.
Json config_to_json(const InterferometerConfig& config);
InterferometerConfig config_from_json(const Json& j);

/// {"photons", "modes", "matrix"}.
Json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const Json& j);

/// {"modes" (optional), "components": [{"N", "weight", "density_matrix"}]}.
Json mixture_to_json(const PhotonNumberMixture& mix);
PhotonNumberMixture mixture_from_json(const Json& j);

/// Everything that determines one CLI run.
struct ExperimentSpec {
    std::string command;
    int photons = 1;
    int photons_max = 0;        ///< range end; 0 means photons
    int modes = 2;
    int modes_max = 0;          ///< range end; 0 means modes
    int measured_modes = 0;     ///< 0 means modes
    int measured_modes_max = 0; ///< range end; 0 means measured_modes
    std::string generator = "haar";
    std::uint64_t seed = 1;
    std::uint64_t shots = 0;
    std::vector<std::uint64_t> shot_sweep;
    int repeats = 1;            ///< seeds per shot count in a sweep
    std::size_t configs = 0;    ///< 0 uses the counting bound
    std::optional<double> rank_tolerance;
    std::size_t r_max = 0;      ///< 0 picks a default from the counting bound
    int max_modes = 0;          ///< 0 picks a default
    std::string state_file;
    std::string mixture_file;
    std::optional<double> detector_efficiency;
    std::string out;
    std::string json_out;       ///< structured result with config provenance

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

Json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

/// CSV with a leading "# schema: lotomo.<name>.v<version>" line.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::string name, std::vector<std::string> columns, int version = 1);

    void row(const std::vector<std::string>& fields);
    std::size_t rows_written() const { return rows_; }

    static std::string schema_line(const std::string& name, int version = 1);

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t rows_ = 0;
};

} // namespace lotomo::io
