/*
 Copyright 2026 The aniso authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef ANISO_IO_HPP
#define ANISO_IO_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aniso/analysis.hpp"
#include "aniso/spectral.hpp"
#include "aniso/statespace.hpp"
#include "aniso/synthesis.hpp"
#include "json.hpp"

namespace aniso::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kModelSchema = "aniso.model";
inline constexpr const char* kReportSchema = "aniso.report";
inline constexpr int kSchemaVersion = 1;

// {"name", "sampling_time", "matrices": {"A", "Bw", "Bu", "Cz", "Dzw", "Dzu",
// "Cy", "Dyw"}, "controller": {"Ac", "Bc", "Cc", "Dc"}}; row-major arrays.
// Missing Cy and Dyw select full information (Cy = I, Dyw = 0); missing Dzw,
// Dzu, Bu are zero; an empty array stands for a matrix with a zero dimension.
struct ModelFile {
  std::string name;
  double sampling_time = 1.0;
  PlantRealization plant;
  std::optional<ControllerRealization> controller;
};

// Matrix <-> nested row-major arrays. `where` prefixes error messages.
MatrixXd matrix_from_json(const Json& j, const std::string& where, int rows = -1, int cols = -1);
Json matrix_to_json(const MatrixXd& M);

ModelFile model_from_json(const Json& j, const std::string& where = "model");
Json model_to_json(const ModelFile& m);
ControllerRealization controller_from_json(const Json& j, const std::string& where, int mu, int py);
Json controller_to_json(const ControllerRealization& c);
ShapingFilter filter_from_json(const Json& j, const std::string& where);

// Report document. Everything outside "metadata" is a deterministic function
// of the inputs; "metadata" carries timestamps and timings.
struct ReportFile {
  std::string command;  // analyze | synthesize | simulate
  std::string status;   // success | feasible | infeasible | numerical-failure
  std::string message;
  std::string solver_backend;
  std::string solver_status;
  std::string mode;          // synthesize
  std::string design_class;  // synthesize, output-feedback classes
  double a = 0.0;
  std::optional<double> gamma, gamma_hat, gamma_lower;
  std::optional<double> h2, hinf, aniso;  // closed-loop norms; aniso from the oracle
  std::optional<double> spectral_radius;
  std::optional<ControllerRealization> controller;
  std::map<std::string, double> residuals;
  std::map<std::string, double> timing;
  int iterations = 0;
  std::vector<ReportFile> runs;  // sweep members
  Json extra = Json::object();   // command-specific payload (simulation summaries)
  Json metadata = Json::object();
};

Json report_to_json(const ReportFile& r);
ReportFile report_from_json(const Json& j, const std::string& where = "report");

ReportFile make_report(const AnalysisReport& a);
ReportFile make_report(const SynthesisReport& s);

// Equality of two report documents with "metadata" removed at every level.
bool reports_equivalent(const Json& a, const Json& b);

Json read_json_file(const std::string& path);
// Writes to a temporary sibling and renames it over `path`: readers never see
// a partial file.
void write_file_atomic(const std::string& path, const std::string& content);
std::string dump(const Json& j);  // two-space indent, trailing newline

}  // namespace aniso::io

#endif
