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
#include "aniso/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

namespace aniso::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

std::string type_name(const Json& j) { return j.type_name(); }

void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object, got " + type_name(j));
}

void reject_unknown(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(where, "unknown key '" + k + "'");
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number, got " + type_name(j));
  return j.get<double>();
}

std::optional<double> finite_or_none(double v) { return std::isfinite(v) ? std::optional<double>(v) : std::nullopt; }

void put_optional(Json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

std::optional<double> get_optional(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return number(j[key], where + "." + key);
}

std::string get_string(const Json& j, const char* key, const std::string& where, const std::string& fallback = "") {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) fail(where + "." + key, "expected a string, got " + type_name(j[key]));
  return j[key].get<std::string>();
}

}  // namespace

MatrixXd matrix_from_json(const Json& j, const std::string& where, int rows, int cols) {
  if (!j.is_array()) fail(where, "expected an array of rows, got " + type_name(j));
  if (j.empty()) {
    if ((rows > 0 && cols > 0) || (rows < 0 && cols > 0) || (cols < 0 && rows > 0))
      fail(where, "empty array where a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix is required");
    return MatrixXd(std::max(rows, 0), std::max(cols, 0));
  }
  const int r = static_cast<int>(j.size());
  int c = -1;
  for (int i = 0; i < r; ++i) {
    if (!j[i].is_array()) fail(where, "row " + std::to_string(i) + " is not an array");
    if (c < 0) c = static_cast<int>(j[i].size());
    if (static_cast<int>(j[i].size()) != c)
      fail(where, "row " + std::to_string(i) + " has " + std::to_string(j[i].size()) + " entries, expected " +
                      std::to_string(c));
  }
  if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols))
    fail(where, "expected " + (rows >= 0 ? std::to_string(rows) : std::string("*")) + "x" +
                    (cols >= 0 ? std::to_string(cols) : std::string("*")) + ", got " + std::to_string(r) + "x" +
                    std::to_string(c));
  MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) {
      const Json& v = j[i][k];
      if (!v.is_number())
        fail(where, "entry (" + std::to_string(i) + "," + std::to_string(k) + ") is " + type_name(v) + ", not a number");
      M(i, k) = v.get<double>();
    }
  return M;
}

Json matrix_to_json(const MatrixXd& M) {
  Json rows = Json::array();
  for (int i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

ControllerRealization controller_from_json(const Json& j, const std::string& where, int mu, int py) {
  require_object(j, where);
  reject_unknown(j, where, {"Ac", "Bc", "Cc", "Dc"});
  if (!j.contains("Dc")) fail(where, "missing key 'Dc'");
  ControllerRealization c;
  c.Dc = matrix_from_json(j["Dc"], where + ".Dc", mu, py);
  if (!j.contains("Ac")) {
    if (j.contains("Bc") || j.contains("Cc")) fail(where, "'Bc'/'Cc' given without 'Ac'");
    return ControllerRealization::static_gain(c.Dc);
  }
  c.Ac = matrix_from_json(j["Ac"], where + ".Ac");
  const int nc = static_cast<int>(c.Ac.rows());
  if (c.Ac.cols() != nc) fail(where + ".Ac", "must be square");
  c.Bc = j.contains("Bc") ? matrix_from_json(j["Bc"], where + ".Bc", nc, py) : MatrixXd::Zero(nc, py);
  c.Cc = j.contains("Cc") ? matrix_from_json(j["Cc"], where + ".Cc", mu, nc) : MatrixXd::Zero(mu, nc);
  return c;
}

Json controller_to_json(const ControllerRealization& c) {
  Json j = Json::object();
  j["Ac"] = matrix_to_json(c.Ac);
  j["Bc"] = matrix_to_json(c.Bc);
  j["Cc"] = matrix_to_json(c.Cc);
  j["Dc"] = matrix_to_json(c.Dc);
  return j;
}

ShapingFilter filter_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, where, {"A", "B", "C", "D"});
  for (const char* k : {"A", "B", "C", "D"})
    if (!j.contains(k)) fail(where, std::string("missing key '") + k + "'");
  ShapingFilter g;
  g.A = matrix_from_json(j["A"], where + ".A");
  const int n = static_cast<int>(g.A.rows());
  if (g.A.cols() != n) fail(where + ".A", "must be square");
  g.D = matrix_from_json(j["D"], where + ".D");
  g.B = matrix_from_json(j["B"], where + ".B", n, static_cast<int>(g.D.cols()));
  g.C = matrix_from_json(j["C"], where + ".C", static_cast<int>(g.D.rows()), n);
  return g;
}

ModelFile model_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, where, {"schema", "schema_version", "name", "sampling_time", "matrices", "controller"});
  if (j.contains("schema") && get_string(j, "schema", where) != kModelSchema)
    fail(where + ".schema", "expected '" + std::string(kModelSchema) + "'");
  if (j.contains("schema_version") && number(j["schema_version"], where + ".schema_version") > kSchemaVersion)
    fail(where + ".schema_version", "newer than supported version " + std::to_string(kSchemaVersion));
  ModelFile m;
  m.name = get_string(j, "name", where);
  if (j.contains("sampling_time")) {
    m.sampling_time = number(j["sampling_time"], where + ".sampling_time");
    if (!(m.sampling_time > 0.0)) fail(where + ".sampling_time", "must be positive");
  }
  if (!j.contains("matrices")) fail(where, "missing key 'matrices'");
  const Json& mj = j["matrices"];
  const std::string w = where + ".matrices";
  require_object(mj, w);
  reject_unknown(mj, w, {"A", "Bw", "Bu", "Cz", "Dzw", "Dzu", "Cy", "Dyw"});
  for (const char* k : {"A", "Bw", "Cz"})
    if (!mj.contains(k)) fail(w, std::string("missing key '") + k + "'");

  PlantRealization& p = m.plant;
  p.A = matrix_from_json(mj["A"], w + ".A");
  const int n = static_cast<int>(p.A.rows());
  if (p.A.cols() != n) fail(w + ".A", "must be square");
  p.Bw = matrix_from_json(mj["Bw"], w + ".Bw", n, -1);
  p.Cz = matrix_from_json(mj["Cz"], w + ".Cz", -1, n);
  const int mw = static_cast<int>(p.Bw.cols()), pz = static_cast<int>(p.Cz.rows());
  p.Bu = mj.contains("Bu") ? matrix_from_json(mj["Bu"], w + ".Bu", n, -1) : MatrixXd(n, 0);
  const int mu = static_cast<int>(p.Bu.cols());
  p.Dzw = mj.contains("Dzw") ? matrix_from_json(mj["Dzw"], w + ".Dzw", pz, mw) : MatrixXd::Zero(pz, mw);
  p.Dzu = mj.contains("Dzu") ? matrix_from_json(mj["Dzu"], w + ".Dzu", pz, mu) : MatrixXd::Zero(pz, mu);
  if (!mj.contains("Cy")) {
    if (mj.contains("Dyw")) fail(w, "'Dyw' given without 'Cy'");
    p.Cy = MatrixXd::Identity(n, n);
    p.Dyw = MatrixXd::Zero(n, mw);
  } else {
    p.Cy = matrix_from_json(mj["Cy"], w + ".Cy", -1, n);
    const int py = static_cast<int>(p.Cy.rows());
    p.Dyw = mj.contains("Dyw") ? matrix_from_json(mj["Dyw"], w + ".Dyw", py, mw) : MatrixXd::Zero(py, mw);
  }
  if (j.contains("controller")) m.controller = controller_from_json(j["controller"], where + ".controller", mu, p.py());
  return m;
}

Json model_to_json(const ModelFile& m) {
  Json j = Json::object();
  j["schema"] = kModelSchema;
  j["schema_version"] = kSchemaVersion;
  j["name"] = m.name;
  j["sampling_time"] = m.sampling_time;
  Json mj = Json::object();
  const PlantRealization& p = m.plant;
  mj["A"] = matrix_to_json(p.A);
  mj["Bw"] = matrix_to_json(p.Bw);
  mj["Bu"] = matrix_to_json(p.Bu);
  mj["Cz"] = matrix_to_json(p.Cz);
  mj["Dzw"] = matrix_to_json(p.Dzw);
  mj["Dzu"] = matrix_to_json(p.Dzu);
  mj["Cy"] = matrix_to_json(p.Cy);
  mj["Dyw"] = matrix_to_json(p.Dyw);
  j["matrices"] = std::move(mj);
  if (m.controller) j["controller"] = controller_to_json(*m.controller);
  return j;
}

Json report_to_json(const ReportFile& r) {
  Json j = Json::object();
  j["schema"] = kReportSchema;
  j["schema_version"] = kSchemaVersion;
  j["command"] = r.command;
  j["status"] = r.status;
  j["message"] = r.message;
  if (!r.solver_backend.empty() || !r.solver_status.empty())
    j["solver"] = {{"backend", r.solver_backend}, {"status", r.solver_status}, {"iterations", r.iterations}};
  if (!r.mode.empty()) j["mode"] = r.mode;
  if (!r.design_class.empty()) j["design_class"] = r.design_class;
  j["a"] = r.a;
  put_optional(j, "gamma", r.gamma);
  put_optional(j, "gamma_hat", r.gamma_hat);
  put_optional(j, "gamma_lower", r.gamma_lower);
  Json norms = Json::object();
  put_optional(norms, "h2", r.h2);
  put_optional(norms, "hinf", r.hinf);
  put_optional(norms, "aniso", r.aniso);
  j["norms"] = std::move(norms);
  put_optional(j, "spectral_radius", r.spectral_radius);
  if (r.controller) j["controller"] = controller_to_json(*r.controller);
  Json res = Json::object();
  for (const auto& [k, v] : r.residuals) res[k] = v;
  j["residuals"] = std::move(res);
  if (!r.runs.empty()) {
    Json runs = Json::array();
    for (const auto& run : r.runs) runs.push_back(report_to_json(run));
    j["runs"] = std::move(runs);
  }
  if (!r.extra.empty()) j["details"] = r.extra;
  Json meta = r.metadata.is_object() ? r.metadata : Json::object();
  if (!r.timing.empty()) {
    Json t = Json::object();
    for (const auto& [k, v] : r.timing) t[k] = v;
    meta["timing"] = std::move(t);
  }
  if (!meta.empty()) j["metadata"] = std::move(meta);
  return j;
}

ReportFile report_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, where,
                 {"schema", "schema_version", "command", "status", "message", "solver", "mode", "design_class", "a",
                  "gamma", "gamma_hat", "gamma_lower", "norms", "spectral_radius", "controller", "residuals", "runs",
                  "details", "metadata"});
  if (get_string(j, "schema", where) != kReportSchema)
    fail(where + ".schema", "expected '" + std::string(kReportSchema) + "'");
  if (!j.contains("schema_version") || number(j["schema_version"], where + ".schema_version") > kSchemaVersion)
    fail(where + ".schema_version", "missing or newer than supported version " + std::to_string(kSchemaVersion));
  ReportFile r;
  r.command = get_string(j, "command", where);
  r.status = get_string(j, "status", where);
  r.message = get_string(j, "message", where);
  if (j.contains("solver")) {
    const Json& s = j["solver"];
    require_object(s, where + ".solver");
    r.solver_backend = get_string(s, "backend", where + ".solver");
    r.solver_status = get_string(s, "status", where + ".solver");
    if (s.contains("iterations")) r.iterations = static_cast<int>(number(s["iterations"], where + ".solver.iterations"));
  }
  r.mode = get_string(j, "mode", where);
  r.design_class = get_string(j, "design_class", where);
  if (j.contains("a")) r.a = number(j["a"], where + ".a");
  r.gamma = get_optional(j, "gamma", where);
  r.gamma_hat = get_optional(j, "gamma_hat", where);
  r.gamma_lower = get_optional(j, "gamma_lower", where);
  if (j.contains("norms")) {
    const Json& n = j["norms"];
    require_object(n, where + ".norms");
    r.h2 = get_optional(n, "h2", where + ".norms");
    r.hinf = get_optional(n, "hinf", where + ".norms");
    r.aniso = get_optional(n, "aniso", where + ".norms");
  }
  r.spectral_radius = get_optional(j, "spectral_radius", where);
  if (j.contains("controller")) {
    const Json& c = j["controller"];
    require_object(c, where + ".controller");
    if (!c.contains("Dc")) fail(where + ".controller", "missing key 'Dc'");
    const MatrixXd Dc = matrix_from_json(c["Dc"], where + ".controller.Dc");
    r.controller = controller_from_json(c, where + ".controller", static_cast<int>(Dc.rows()),
                                        static_cast<int>(Dc.cols()));
  }
  if (j.contains("residuals")) {
    require_object(j["residuals"], where + ".residuals");
    for (const auto& [k, v] : j["residuals"].items()) r.residuals[k] = number(v, where + ".residuals." + k);
  }
  if (j.contains("runs")) {
    if (!j["runs"].is_array()) fail(where + ".runs", "expected an array");
    for (size_t i = 0; i < j["runs"].size(); ++i)
      r.runs.push_back(report_from_json(j["runs"][i], where + ".runs[" + std::to_string(i) + "]"));
  }
  if (j.contains("details")) r.extra = j["details"];
  if (j.contains("metadata")) {
    require_object(j["metadata"], where + ".metadata");
    r.metadata = j["metadata"];
    if (r.metadata.contains("timing")) {
      require_object(r.metadata["timing"], where + ".metadata.timing");
      for (const auto& [k, v] : r.metadata["timing"].items()) r.timing[k] = number(v, where + ".metadata.timing." + k);
      r.metadata.erase("timing");
    }
  }
  return r;
}

ReportFile make_report(const AnalysisReport& a) {
  ReportFile r;
  r.command = "analyze";
  if (a.gamma_tested) {
    r.status = a.feasible ? "feasible"
               : a.solver_status == solver::Status::infeasible ? "infeasible"
                                                               : "numerical-failure";
    r.gamma = *a.gamma_tested;
    r.gamma_hat = *a.gamma_tested * *a.gamma_tested;
  } else {
    r.status = a.feasible ? "success" : "numerical-failure";
    if (a.feasible) {
      r.gamma = a.gamma;
      r.gamma_hat = a.gamma_hat;
      r.gamma_lower = a.gamma_lower;
      if (std::isfinite(a.oracle.value) && a.oracle.value > 0.0)
        r.residuals["oracle_relative_difference"] = std::abs(a.gamma - a.oracle.value) / a.oracle.value;
    }
  }
  r.message = a.message;
  r.solver_backend = solver::default_backend()->name();
  r.solver_status = solver::to_string(a.solver_status);
  r.iterations = a.iterations;
  r.a = a.a;
  r.h2 = finite_or_none(a.h2.value);
  r.hinf = finite_or_none(a.hinf.value);
  r.aniso = finite_or_none(a.oracle.value);
  r.spectral_radius = finite_or_none(a.spectral_radius);
  r.timing["wall_time"] = a.wall_time;
  return r;
}

ReportFile make_report(const SynthesisReport& s) {
  ReportFile r;
  r.command = "synthesize";
  r.status = to_string(s.status);
  r.message = s.message;
  r.solver_backend = solver::default_backend()->name();
  r.solver_status = solver::to_string(s.solver_status);
  r.iterations = s.iterations;
  r.mode = to_string(s.mode);
  r.design_class = s.design_class;
  r.a = s.a;
  r.timing["wall_time"] = s.wall_time;
  if (s.status == SynthesisStatus::infeasible) {
    r.gamma_lower = finite_or_none(s.gamma_min);
    return r;
  }
  if (s.gamma > 0.0) {
    r.gamma = finite_or_none(s.gamma);
    r.gamma_hat = finite_or_none(s.gamma_hat);
    r.gamma_lower = finite_or_none(s.gamma_min);
  }
  if (s.controller.Dc.size() > 0 || s.controller.order() > 0) {
    r.controller = s.controller;
    r.spectral_radius = finite_or_none(s.spectral_radius);
  }
  if (!s.oracle.kind.empty()) r.aniso = finite_or_none(s.oracle.value);
  if (!s.h2.kind.empty()) r.h2 = finite_or_none(s.h2.value);
  if (!s.hinf.kind.empty()) r.hinf = finite_or_none(s.hinf.value);
  if (std::isfinite(s.certified_gamma) && s.certified_gamma > 0.0) r.residuals["certified_gamma"] = s.certified_gamma;
  if (s.reconstruction_residual) r.residuals["reconstruction_max_eig"] = *s.reconstruction_residual;
  if (s.gain_condition > 0.0) r.residuals["gain_condition"] = s.gain_condition;
  if (s.coupling_min_singular > 0.0) r.residuals["coupling_min_singular"] = s.coupling_min_singular;
  r.residuals["solver_gap"] = s.solver_gap;
  return r;
}

namespace {

Json strip_metadata(Json j) {
  if (j.is_object()) {
    j.erase("metadata");
    for (auto& [k, v] : j.items()) v = strip_metadata(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_metadata(v);
  }
  return j;
}

}  // namespace

bool reports_equivalent(const Json& a, const Json& b) { return strip_metadata(a) == strip_metadata(b); }

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(path + ": cannot write file");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(path + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(path + ": cannot replace file");
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace aniso::io
