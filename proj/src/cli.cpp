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
#include "aniso/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "aniso/analysis.hpp"
#include "aniso/io.hpp"
#include "aniso/sim.hpp"
#include "aniso/synthesis.hpp"

namespace aniso::cli {

namespace {

using io::Json;

struct Common {
  std::string out = "-";
  bool reproducible = false;
};

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void stamp(io::ReportFile& r, const Common& c) {
  if (c.reproducible) {
    r.timing.clear();
    r.metadata = Json::object();
    for (auto& run : r.runs) stamp(run, c);
    return;
  }
  r.metadata["generator"] = std::string("aniso ") + kVersion;
  r.metadata["created"] = utc_timestamp();
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    io::write_file_atomic(path, text);
}

ClosedLoopRealization system_of(const io::ModelFile& m) {
  return m.controller ? close_loop_dynamic(m.plant, *m.controller) : open_loop(m.plant);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument("cannot parse '" + item + "' as a number");
    v.push_back(x);
  }
  if (v.empty()) throw std::invalid_argument("empty list");
  return v;
}

Json inline_or_file(const std::string& spec) {
  if (!spec.empty() && (spec.front() == '[' || spec.front() == '{')) {
    try {
      return Json::parse(spec);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("inline JSON: ") + e.what());
    }
  }
  return io::read_json_file(spec);
}

int analyze_cmd(const io::ModelFile& m, double a, std::optional<double> gamma, std::optional<long> grid,
                const Common& c, std::ostream& out) {
  QuadratureSpec q;
  if (grid) {
    if (*grid < 16) throw std::invalid_argument("--grid must be at least 16");
    q.initial_points = *grid;
    q.max_points = std::max(q.max_points, *grid);
  }
  const AnalysisReport a_rep = analyze(system_of(m), a, gamma, {}, q);
  io::ReportFile r = io::make_report(a_rep);
  stamp(r, c);
  emit(c.out, io::dump(io::report_to_json(r)), out);
  if (r.status == "feasible" || r.status == "success") return kSuccess;
  return r.status == "infeasible" ? kInfeasible : kError;
}

int exit_of(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::success: return kSuccess;
    case SynthesisStatus::infeasible: return kInfeasible;
    case SynthesisStatus::numerical_failure: return kError;
  }
  return kError;
}

int synthesize_cmd(const io::ModelFile& m, SynthesisRequest req, const std::vector<double>& levels,
                   const std::string& controller_out, const Common& c, std::ostream& out) {
  req.plant = m.plant;
  std::vector<SynthesisReport> reps;
  if (levels.size() == 1) {
    req.a = levels.front();
    reps.push_back(synthesize(req));
  } else {
    reps = synthesize_sweep(req, levels);
  }
  io::ReportFile r;
  int code = kSuccess;
  if (levels.size() == 1) {
    r = io::make_report(reps.front());
    code = exit_of(reps.front().status);
  } else {
    r.command = "synthesize";
    r.mode = to_string(req.mode);
    r.solver_backend = solver::default_backend()->name();
    r.a = levels.back();
    Json column = Json::array();
    bool ordered = true;
    double prev = -1.0;
    bool all_ok = true;
    for (const auto& s : reps) {
      r.runs.push_back(io::make_report(s));
      r.iterations += s.iterations;
      if (s.ok()) {
        column.push_back(s.gamma);
        if (s.gamma < prev) ordered = false;
        prev = s.gamma;
      } else {
        column.push_back(nullptr);
        all_ok = false;
      }
      const int e = exit_of(s.status);
      if (e == kError || (e == kInfeasible && code == kSuccess)) code = e;
    }
    r.status = all_ok ? "success" : (code == kInfeasible ? "infeasible" : "numerical-failure");
    r.message = all_ok ? (ordered ? "gamma nondecreasing in a" : "gamma not monotone in a") : "some runs failed";
    r.extra["a"] = levels;
    r.extra["gamma"] = column;
    r.extra["gamma_nondecreasing"] = all_ok && ordered;
  }
  stamp(r, c);
  emit(c.out, io::dump(io::report_to_json(r)), out);
  if (!controller_out.empty()) {
    const SynthesisReport& best = reps.back();
    if (!best.ok()) throw Error("no controller to write: last design did not succeed");
    io::ModelFile cm = m;
    cm.controller = best.controller;
    io::write_file_atomic(controller_out, io::dump(io::model_to_json(cm)));
  }
  return code;
}

// white | white:LAMBDA | shaped:a=A | shaped:FILE.json | input:FILE.csv
MatrixXd read_csv_input(const std::string& path, int mw, long steps) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      size_t used = 0;
      try {
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
      }
      if (numeric && used != cell.size() && cell.find_first_not_of(" \t\r", used) != std::string::npos) numeric = false;
    }
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw ParseError(path + ": line " + std::to_string(lineno) + " is not numeric");
    }
    if (static_cast<int>(row.size()) != mw)
      throw ParseError(path + ": line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                       " columns, expected " + std::to_string(mw));
    rows.push_back(std::move(row));
  }
  const long n = std::min<long>(steps, static_cast<long>(rows.size()));
  MatrixXd W(mw, n);
  for (long k = 0; k < n; ++k)
    for (int i = 0; i < mw; ++i) W(i, k) = rows[k][i];
  return W;
}

int simulate_cmd(const io::ModelFile& m, const ControllerRealization& ctrl, const std::string& noise, long steps,
                 std::uint64_t seed, int trials, const std::string& csv, const Common& c, std::ostream& out) {
  if (steps <= 0) throw std::invalid_argument("--steps must be positive");
  if (csv == "-" && (c.out.empty() || c.out == "-"))
    throw std::invalid_argument("--csv - needs --out FILE for the summary");
  const int mw = m.plant.mw();
  const ClosedLoopRealization cl = close_loop_dynamic(m.plant, ctrl);
  if (!cl.is_stable()) throw UnstableSystem("closed loop is not stable (spectral radius " +
                                            std::to_string(cl.spectral_radius()) + ")");
  Json details = Json::object();
  details["noise"] = noise;
  details["steps"] = steps;
  details["seed"] = seed;

  std::optional<sim::NoiseSpec> spec;
  MatrixXd W;
  const auto colon = noise.find(':');
  const std::string kind = noise.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : noise.substr(colon + 1);
  if (kind == "white") {
    spec = sim::NoiseSpec::white(mw, steps, seed, arg.empty() ? 1.0 : parse_list(arg).at(0));
  } else if (kind == "shaped") {
    ShapingFilter g;
    if (arg.rfind("a=", 0) == 0) {
      const double level = parse_list(arg.substr(2)).at(0);
      if (level < 0.0) throw std::invalid_argument("shaped noise needs a >= 0");
      g = sim::first_order_filter(mw, sim::first_order_pole(mw, level));
    } else {
      g = io::filter_from_json(io::read_json_file(arg), arg);
    }
    spec = sim::NoiseSpec::shaped(g, steps, seed);
    details["mean_anisotropy"] = mean_anisotropy(g);
    details["warmup"] = sim::warmup_length(*spec);
  } else if (kind == "input") {
    W = read_csv_input(arg, mw, steps);
  } else {
    throw std::invalid_argument("unknown noise spec '" + noise + "' (white[:lambda], shaped:a=A, shaped:FILE, input:FILE)");
  }
  if (spec) W = sim::generate_noise(*spec);

  const sim::Trajectory t = sim::simulate(m.plant, ctrl, W);
  details["bounded"] = t.finite();
  Json table = Json::array();
  for (const auto& [name, v] : sim::max_abs_deviation(t)) table.push_back({{"signal", name}, {"max_abs", v}});
  details["max_abs_deviation"] = std::move(table);
  const double wn = W.squaredNorm();
  if (wn > 0.0) details["power_gain"] = std::sqrt(t.z.squaredNorm() / wn);
  if (spec && trials > 0) {
    const sim::GainEstimate g = sim::empirical_gain(cl, *spec, trials);
    details["empirical_gain"] = {{"trials", trials}, {"mean", g.mean}, {"stddev", g.stddev},
                                 {"standard_error", g.standard_error}, {"lower", g.lower}, {"upper", g.upper}};
  }
  if (!csv.empty()) {
    std::ostringstream ss;
    sim::write_csv(t, ss);
    emit(csv, ss.str(), out);
  }
  io::ReportFile r;
  r.command = "simulate";
  r.status = t.finite() ? "success" : "numerical-failure";
  r.message = "closed-loop simulation";
  r.spectral_radius = cl.spectral_radius();
  r.controller = ctrl;
  r.extra = std::move(details);
  stamp(r, c);
  emit(c.out, io::dump(io::report_to_json(r)), out);
  return t.finite() ? kSuccess : kError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anisotropy-based robust analysis and synthesis for discrete-time LTI systems", "aniso"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("aniso ") + kVersion);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "report path ('-' for standard output)");
    sub->add_flag("--reproducible", common.reproducible, "omit timestamps and timings (byte-identical reruns)");
  };

  std::string model_path;
  double a = 0.0;
  std::optional<double> gamma;
  std::optional<long> grid;

  CLI::App* an = app.add_subcommand("analyze", "anisotropic-norm analysis of a model (closed loop if it has a controller)");
  an->add_option("--model", model_path, "model JSON")->required();
  an->add_option("--a", a, "mean-anisotropy level a >= 0")->required();
  an->add_option("--gamma", gamma, "test this bound instead of minimizing");
  an->add_option("--grid", grid, "initial quadrature grid size of the frequency-domain oracle");
  add_common(an);

  std::string mode = "sof", sweep, mask, controller_out;
  int order = 0;
  bool allow_marginal = false;
  double eps = 1e-7;
  CLI::App* sy = app.add_subcommand("synthesize", "controller synthesis");
  sy->add_option("--model", model_path, "model JSON")->required();
  sy->add_option("--mode", mode,
                 "state-feedback | full-order | sof | sof-structural | sof-singular-control | "
                 "sof-singular-filtering | fixed-order");
  auto* a_opt = sy->add_option("--a", a, "mean-anisotropy level a >= 0");
  auto* sweep_opt = sy->add_option("--sweep", sweep, "comma-separated anisotropy levels, e.g. 0,0.7,30");
  a_opt->excludes(sweep_opt);
  sy->add_option("--gamma", gamma, "fixed bound (feasibility design)");
  sy->add_option("--order", order, "fixed-order controller size");
  sy->add_option("--mask", mask, "0/1 gain pattern: JSON file or inline array");
  sy->add_option("--controller-out", controller_out, "write the model with the designed controller here");
  sy->add_option("--eps", eps, "strictness margin of the design LMIs");
  sy->add_flag("--allow-marginal", allow_marginal, "proceed on nearly unstabilizable/undetectable plants");
  add_common(sy);

  std::string controller_path, noise = "white", csv;
  long steps = 1000;
  std::uint64_t seed = 0;
  int trials = 0;
  CLI::App* si = app.add_subcommand("simulate", "closed-loop simulation under stochastic or recorded disturbances");
  si->add_option("--model", model_path, "model JSON")->required();
  si->add_option("--controller", controller_path, "JSON with a 'controller' section (model or report file)");
  si->add_option("--noise", noise, "white[:lambda] | shaped:a=A | shaped:FILTER.json | input:FILE.csv");
  si->add_option("--steps", steps, "number of samples");
  si->add_option("--seed", seed, "generator seed");
  si->add_option("--trials", trials, "independent runs for the empirical gain estimate");
  si->add_option("--csv", csv, "trajectory CSV path ('-' for standard output)");
  add_common(si);

  std::string lhs, rhs;
  CLI::App* cmp = app.add_subcommand("compare", "compare two reports ignoring metadata (exit 2 if they differ)");
  cmp->add_option("first", lhs)->required();
  cmp->add_option("second", rhs)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForVersion&) {
    out << "aniso " << kVersion << "\n";
    return kSuccess;
  } catch (const CLI::Success&) {  // help requests
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }

  try {
    if (*cmp) {
      const bool same = io::reports_equivalent(io::read_json_file(lhs), io::read_json_file(rhs));
      out << (same ? "equivalent" : "different") << "\n";
      return same ? kSuccess : kInfeasible;
    }
    const io::ModelFile m = io::model_from_json(io::read_json_file(model_path), model_path);
    m.plant.check_dimensions();
    if (*an) return analyze_cmd(m, a, gamma, grid, common, out);
    if (*sy) {
      SynthesisRequest req;
      req.mode = design_mode_from_string(mode);
      req.gamma = gamma;
      req.order = order;
      req.eps = eps;
      req.allow_marginal = allow_marginal;
      if (!mask.empty()) req.mask = io::matrix_from_json(inline_or_file(mask), "mask");
      const std::vector<double> levels = sweep.empty() ? std::vector<double>{a} : parse_list(sweep);
      return synthesize_cmd(m, req, levels, controller_out, common, out);
    }
    if (*si) {
      ControllerRealization ctrl;
      if (!controller_path.empty()) {
        const Json cj = io::read_json_file(controller_path);
        if (!cj.is_object() || !cj.contains("controller"))
          throw ParseError(controller_path + ": missing key 'controller'");
        ctrl = io::controller_from_json(cj["controller"], controller_path + ": controller", m.plant.mu(), m.plant.py());
      } else if (m.controller) {
        ctrl = *m.controller;
      } else {
        ctrl = ControllerRealization::static_gain(MatrixXd::Zero(m.plant.mu(), m.plant.py()));
      }
      return simulate_cmd(m, ctrl, noise, steps, seed, trials, csv, common, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace aniso::cli
