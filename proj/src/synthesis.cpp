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
#include "aniso/synthesis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace aniso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

MatrixXd I(int n) { return MatrixXd::Identity(n, n); }

double max_abs(const MatrixXd& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

double condition(const MatrixXd& M) {
  if (M.size() == 0) return 1.0;
  Eigen::JacobiSVD<MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

int numerical_rank(const MatrixXd& M, double rel_tol = 1e-10) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * std::max(1.0, s(0))) ++r;
  return r;
}

MatrixXd symmetric_inverse(const MatrixXd& P, const std::string& what, double* cond) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (P + P.transpose()));
  const VectorXd& ev = es.eigenvalues();
  if (ev.size() == 0) return P;
  if (!(ev(0) > 0.0)) throw ReconstructionDegenerate(what + " is not positive definite");
  if (cond) *cond = ev(ev.size() - 1) / ev(0);
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

MatrixXd general_inverse(const MatrixXd& M, const std::string& what, double* cond) {
  const double c = condition(M);
  if (cond) *cond = c;
  if (!(c < 1e12)) throw ReconstructionDegenerate(what + " is singular (condition number " + std::to_string(c) + ")");
  return M.partialPivLu().inverse();
}

void require_admissible(const PlantRealization& plant, bool allow_marginal) {
  const ValidationReport v = validate_plant(plant);
  if (!v.admissible()) {
    std::string msg = "plant is not admissible:";
    for (const auto& m : v.messages) msg += " " + m + ";";
    throw InadmissiblePlant(msg);
  }
  if (v.marginal && !allow_marginal)
    throw InadmissiblePlant("plant is close to losing stabilizability/detectability (margins " +
                            std::to_string(v.stabilizability_margin) + ", " +
                            std::to_string(v.detectability_margin) + "); enable allow_marginal to proceed");
}

// Outcome of turning a solved design problem into a controller.
struct Recovered {
  ControllerRealization controller;
  double gain_condition = 1.0;
  double coupling_min_singular = kNaN;
  std::optional<MatrixXd> Phi, Pi;  // closed-loop Lyapunov pair when available
};

using Builder = std::function<lmi::MaxdetProblem(std::optional<double>)>;
using Recoverer = std::function<Recovered(const lmi::MaxdetProblem&, const VectorXd&)>;

// Residual of the analysis conditions at the recovered Lyapunov pair, then
// validation of the (state-rescaled) controller.
SynthesisReport finish_design(const SynthesisRequest& req, const PlantRealization& plant, const Recovered& rec,
                              const lmi::MaxdetProblem& problem, const VectorXd& x, double gamma) {
  std::optional<double> residual;
  if (rec.Phi && rec.Pi) {
    const bool limit = problem.meta.count("limit_form") > 0;
    const double eta = limit ? std::numeric_limits<double>::infinity() : problem.value("eta", x)(0, 0);
    const MatrixXd Psi = problem.value(limit ? "Xi" : "Psi", x);
    const auto res = lmi::evaluate_reciprocal_conditions(close_loop_dynamic(plant, rec.controller), req.a,
                                                         gamma * gamma, eta, Psi, *rec.Phi, *rec.Pi);
    residual = std::max(res.lmi3_max_eig, res.lmi4_max_eig);
  }
  const ControllerRealization ctrl = balance_controller(plant, rec.controller);

  SynthesisReport r;
  if (req.validate) {
    r = validate_design(plant, ctrl, req.a, gamma, req.solver, req.quadrature);
  } else {
    r.controller = ctrl;
    r.closed_loop = close_loop_dynamic(plant, ctrl);
    r.spectral_radius = r.closed_loop.spectral_radius();
    r.stable = r.spectral_radius < 1.0;
    r.status = r.stable ? SynthesisStatus::success : SynthesisStatus::numerical_failure;
    r.a = req.a;
    r.gamma = gamma;
    r.gamma_hat = gamma * gamma;
  }
  // A design whose closed-loop analysis bound lands marginally above the
  // synthesis value (solver accuracy) is reported at the certified bound.
  if (req.validate && !r.certified && std::isfinite(r.certified_gamma) && r.stable &&
      r.certified_gamma <= gamma * (1.0 + req.bound_slack)) {
    r.gamma = r.certified_gamma;
    r.gamma_hat = r.gamma * r.gamma;
    r.certified = true;
    r.status = SynthesisStatus::success;
    r.message = "closed loop stable; gamma raised to the closed-loop analysis bound";
  }
  r.gain_condition = rec.gain_condition;
  r.coupling_min_singular = rec.coupling_min_singular;
  r.reconstruction_residual = residual;
  return r;
}

// Solve, recover the controller from the returned interior point and validate.
SynthesisReport run_design(const SynthesisRequest& req, const PlantRealization& plant, const Builder& build,
                           const Recoverer& recover) {
  const auto t0 = std::chrono::steady_clock::now();
  SynthesisReport r;
  auto stamp = [&](SynthesisReport& out) {
    out.mode = req.mode;
    out.a = req.a;
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  };

  const lmi::MaxdetProblem p = build(req.gamma);
  solver::Options opts = req.solver;
  if (!req.gamma) opts.gap_tol = std::max(opts.gap_tol, req.recovery_gap);
  const solver::Solution s = solver::solve(p, opts);
  auto diagnostics = [&](SynthesisReport& out) {
    out.solver_status = s.status;
    out.iterations = s.iterations;
    out.solver_gap = s.gap;
  };
  diagnostics(r);
  if (s.status == solver::Status::infeasible) {
    r.status = SynthesisStatus::infeasible;
    r.message = req.gamma ? "design LMIs infeasible at gamma = " + std::to_string(*req.gamma)
                          : std::string("design LMIs infeasible for every gamma");
    r.message += " (" + s.message + ")";
    return stamp(r);
  }
  if (!s.has_point()) {
    r.status = SynthesisStatus::numerical_failure;
    r.message = "solver: " + solver::to_string(s.status) + " (" + s.message + ")";
    return stamp(r);
  }
  const double gh = p.value("gamma_hat", s.x)(0, 0);
  if (!(gh > 0.0) || !std::isfinite(gh)) {
    r.status = SynthesisStatus::numerical_failure;
    r.message = "non-positive gamma_hat " + std::to_string(gh);
    return stamp(r);
  }
  const double gamma = std::sqrt(gh);

  Recovered rec;
  try {
    rec = recover(p, s.x);
  } catch (const ReconstructionDegenerate& e) {
    r.status = SynthesisStatus::numerical_failure;
    r.message = std::string("controller recovery failed: ") + e.what();
    r.gamma = gamma;
    r.gamma_hat = gh;
    return stamp(r);
  }
  r = finish_design(req, plant, rec, p, s.x, gamma);
  r.gamma_min = req.gamma ? gamma : std::sqrt(std::max(0.0, std::min(gh, s.dual_bound)));
  diagnostics(r);
  return stamp(r);
}

bool is_identity_output(const PlantRealization& p) {
  return p.py() == p.nx() && max_abs(p.Cy - I(p.nx())) <= 1e-12 && max_abs(p.Dyw) <= 1e-12;
}

SynthesisReport run_sof_class(const SynthesisRequest& req, const PlantRealization& plant, const std::string& cls) {
  if (req.mask && cls != "structural")
    throw StructuralPropertyViolation("gain masks are supported only by the vanishing-Tyu class");
  SynthesisReport r;
  if (cls == "structural") {
    const StructuralTransform st = decompose_vanishing_tyu(plant);
    const PlantRealization bar = apply_transform(plant, st.T, st.T_inv);
    r = run_design(
        req, plant,
        [&](std::optional<double> g) { return lmi::build_sof_structural(bar, st.split, req.a, g, req.mask, req.eps); },
        [](const lmi::MaxdetProblem& p, const VectorXd& x) {
          Recovered rec;
          rec.controller = ControllerRealization::static_gain(p.value("K", x));
          return rec;
        });
  } else if (cls == "singular-control") {
    const StructuralTransform st = transform_singular_control(plant);
    const PlantRealization bar = apply_transform(plant, st.T, st.T_inv);
    r = run_design(
        req, plant, [&](std::optional<double> g) { return lmi::build_sof_singular_control(bar, req.a, g, req.eps); },
        [](const lmi::MaxdetProblem& p, const VectorXd& x) {
          Recovered rec;
          const MatrixXd S1inv = general_inverse(p.value("S1", x), "S1", &rec.gain_condition);
          rec.controller = ControllerRealization::static_gain(S1inv * p.value("L1", x));
          return rec;
        });
  } else if (cls == "singular-filtering") {
    const StructuralTransform st = transform_singular_filtering(plant);
    const PlantRealization bar = apply_transform(plant, st.T, st.T_inv);
    r = run_design(
        req, plant,
        [&](std::optional<double> g) { return lmi::build_sof_singular_filtering(bar, req.a, g, req.eps); },
        [](const lmi::MaxdetProblem& p, const VectorXd& x) {
          Recovered rec;
          const MatrixXd R1inv = general_inverse(p.value("R1", x), "R1", &rec.gain_condition);
          rec.controller = ControllerRealization::static_gain(p.value("M1", x) * R1inv);
          return rec;
        });
  } else {
    throw NoConvexClassApplies("unknown static-output-feedback class '" + cls + "'");
  }
  r.design_class = cls;
  return r;
}

bool singular_control_applies(const PlantRealization& p) {
  return p.mu() > 0 && p.mu() <= p.nx() && max_abs(p.Dzu) <= 1e-12 * std::max(1.0, max_abs(p.Cz)) &&
         numerical_rank(p.Bu) == p.mu();
}

bool singular_filtering_applies(const PlantRealization& p) {
  return p.py() > 0 && p.py() <= p.nx() && max_abs(p.Dyw) <= 1e-12 * std::max(1.0, max_abs(p.Bw)) &&
         numerical_rank(p.Cy) == p.py();
}

}  // namespace

std::string to_string(DesignMode m) {
  switch (m) {
    case DesignMode::state_feedback: return "state-feedback";
    case DesignMode::full_order: return "full-order";
    case DesignMode::sof_auto: return "sof";
    case DesignMode::sof_structural: return "sof-structural";
    case DesignMode::sof_singular_control: return "sof-singular-control";
    case DesignMode::sof_singular_filtering: return "sof-singular-filtering";
    case DesignMode::fixed_order: return "fixed-order";
  }
  return "?";
}

DesignMode design_mode_from_string(const std::string& s) {
  for (DesignMode m : {DesignMode::state_feedback, DesignMode::full_order, DesignMode::sof_auto,
                       DesignMode::sof_structural, DesignMode::sof_singular_control,
                       DesignMode::sof_singular_filtering, DesignMode::fixed_order})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown design mode '" + s + "'");
}

std::string to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::success: return "success";
    case SynthesisStatus::infeasible: return "infeasible";
    case SynthesisStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

std::optional<std::string> detect_sof_class(const PlantRealization& plant) {
  plant.check_dimensions();
  if (tyu_vanishes(plant)) {
    try {
      decompose_vanishing_tyu(plant);
      return "structural";
    } catch (const Error&) {
    }
  }
  if (singular_control_applies(plant)) return "singular-control";
  if (singular_filtering_applies(plant)) return "singular-filtering";
  return std::nullopt;
}

FullOrderRecovery recover_full_order(const PlantRealization& plant, const MatrixXd& Pi11, const MatrixXd& Phi11,
                                     const MatrixXd& Ah, const MatrixXd& Bh, const MatrixXd& Ch, const MatrixXd& Dh,
                                     double rel_tol) {
  const int n = plant.nx();
  const MatrixXd &A = plant.A, &Bu = plant.Bu, &Cy = plant.Cy;
  // Pi12 Phi12' = I - Pi11 Phi11, split evenly through the SVD.
  Eigen::JacobiSVD<MatrixXd> svd(I(n) - Pi11 * Phi11, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd sig = svd.singularValues();
  FullOrderRecovery out;
  out.coupling_min_singular = n ? sig(n - 1) : 0.0;
  if (n && !(sig(n - 1) > rel_tol * std::max(1.0, sig(0))))
    throw ReconstructionDegenerate("I - Pi11 Phi11 is singular (smallest singular value " +
                                   std::to_string(sig(n - 1)) + ")");
  const VectorXd sq = sig.cwiseSqrt();
  const MatrixXd Pi12 = svd.matrixU() * sq.asDiagonal();
  const MatrixXd Phi12 = svd.matrixV() * sq.asDiagonal();
  const MatrixXd Pi12_invT = svd.matrixU() * sq.cwiseInverse().asDiagonal();           // Pi12^-T
  const MatrixXd Phi12_inv = sq.cwiseInverse().asDiagonal() * svd.matrixV().transpose();  // Phi12^-1

  ControllerRealization& c = out.controller;
  c.Dc = Dh;
  c.Cc = (Ch - c.Dc * Cy * Pi11) * Pi12_invT;
  c.Bc = Phi12_inv * (Bh - Phi11 * Bu * c.Dc);
  c.Ac = Phi12_inv *
         (Ah - Phi11 * (A + Bu * c.Dc * Cy) * Pi11 - Phi12 * c.Bc * Cy * Pi11 - Phi11 * Bu * c.Cc * Pi12.transpose()) *
         Pi12_invT;

  // Phi Pi1 = Phi1 with Pi1 = [Pi11 I; Pi12' 0], Phi1 = [I Phi11; 0 Phi12'].
  MatrixXd P1 = MatrixXd::Zero(2 * n, 2 * n), F1 = MatrixXd::Zero(2 * n, 2 * n);
  P1 << Pi11, I(n), Pi12.transpose(), MatrixXd::Zero(n, n);
  F1 << I(n), Phi11, MatrixXd::Zero(n, n), Phi12.transpose();
  const MatrixXd Phi = F1 * P1.partialPivLu().inverse();
  const MatrixXd Pi = P1 * F1.partialPivLu().inverse();
  out.Phi = 0.5 * (Phi + Phi.transpose());
  out.Pi = 0.5 * (Pi + Pi.transpose());
  return out;
}

SynthesisReport validate_design(const PlantRealization& plant, const ControllerRealization& ctrl, double a,
                                double gamma, const solver::Options& opts, const QuadratureSpec& quad,
                                double rel_tol) {
  SynthesisReport r;
  r.a = a;
  r.gamma = gamma;
  r.gamma_hat = gamma * gamma;
  r.controller = ctrl;
  r.closed_loop = close_loop_dynamic(plant, ctrl);
  r.spectral_radius = r.closed_loop.spectral_radius();
  r.stable = r.spectral_radius < 1.0;
  if (!r.stable) {
    r.status = SynthesisStatus::numerical_failure;
    r.message = "closed loop is unstable (spectral radius " + std::to_string(r.spectral_radius) + ")";
    return r;
  }
  r.h2 = h2_norm(r.closed_loop);
  r.hinf = hinf_norm(r.closed_loop);
  try {
    r.oracle = anisotropic_norm_oracle(r.closed_loop, a, quad);
  } catch (const Error& e) {
    r.message = std::string("oracle unavailable: ") + e.what() + "; ";
    r.oracle.value = kNaN;
  }

  // A strictly feasible analysis point at gamma_c <= gamma lifts to one at
  // gamma (eta and Psi shift by gamma^2 - gamma_c^2), so the minimized bound
  // is the certificate.
  // The output is normalized (by the oracle value when available) so the
  // solver's gap tolerance acts relatively, and the loop is put in balanced
  // coordinates: recovered controllers can be badly scaled internally.
  ClosedLoopRealization normalized = r.closed_loop;
  const double scale = std::isfinite(r.oracle.value) && r.oracle.value > 0.0 ? r.oracle.value
                       : gamma > 0.0                                         ? gamma
                                                                             : 1.0;
  normalized.C /= scale;
  normalized.D /= scale;
  normalized = balanced_realization(normalized);
  const lmi::MaxdetProblem analysis = lmi::build_sanbrl(normalized, a, std::nullopt);
  const solver::Solution as = solver::solve(analysis, opts);
  const bool point = as.has_point() && solver::verify(analysis, as).all_satisfied;
  r.certified_gamma = point ? scale * std::sqrt(std::max(0.0, as.objective)) : kNaN;
  r.certified = point && r.certified_gamma <= gamma * (1.0 + rel_tol);

  if (r.certified) {
    r.status = SynthesisStatus::success;
    r.message += "closed loop stable; analysis conditions hold at gamma";
  } else {
    r.status = SynthesisStatus::numerical_failure;
    r.message += point ? "closed-loop analysis bound " + std::to_string(r.certified_gamma) + " exceeds gamma"
                       : "closed-loop analysis failed (" + solver::to_string(as.status) + ": " + as.message + ")";
  }
  return r;
}

SynthesisReport synthesize_state_feedback(const SynthesisRequest& req) {
  const PlantRealization& plant = req.plant;
  plant.check_dimensions();
  if (!is_identity_output(plant))
    throw StructuralPropertyViolation("state feedback requires a full-information plant (Cy = I, Dyw = 0)");
  require_admissible(plant, req.allow_marginal);
  return run_design(
      req, plant, [&](std::optional<double> g) { return lmi::build_state_feedback(plant, req.a, g, req.eps); },
      [](const lmi::MaxdetProblem& p, const VectorXd& x) {
        Recovered rec;
        const MatrixXd Pi = p.value("Pi", x);
        const MatrixXd Pi_inv = symmetric_inverse(Pi, "Pi", &rec.gain_condition);
        rec.controller = ControllerRealization::static_gain(p.value("Lambda", x) * Pi_inv);
        rec.Pi = 0.5 * (Pi + Pi.transpose());
        rec.Phi = Pi_inv;
        return rec;
      });
}

SynthesisReport synthesize_full_order(const SynthesisRequest& req) {
  const PlantRealization& plant = req.plant;
  plant.check_dimensions();
  require_admissible(plant, req.allow_marginal);
  return run_design(
      req, plant, [&](std::optional<double> g) { return lmi::build_full_order(plant, req.a, g, req.eps); },
      [&](const lmi::MaxdetProblem& p, const VectorXd& x) {
        const FullOrderRecovery f =
            recover_full_order(plant, p.value("Pi11", x), p.value("Phi11", x), p.value("Ac_hat", x),
                               p.value("Bc_hat", x), p.value("Cc_hat", x), p.value("Dc_hat", x));
        Recovered rec;
        rec.controller = f.controller;
        rec.coupling_min_singular = f.coupling_min_singular;
        rec.gain_condition = condition(f.Pi);
        rec.Phi = f.Phi;
        rec.Pi = f.Pi;
        return rec;
      });
}

SynthesisReport synthesize_sof(const SynthesisRequest& req) {
  const PlantRealization& plant = req.plant;
  plant.check_dimensions();
  require_admissible(plant, req.allow_marginal);
  std::string cls;
  switch (req.mode) {
    case DesignMode::sof_structural:
      if (!tyu_vanishes(plant)) throw NoConvexClassApplies("structural class needs a vanishing Tyu transfer");
      cls = "structural";
      break;
    case DesignMode::sof_singular_control:
      if (!singular_control_applies(plant))
        throw NoConvexClassApplies("singular-control class needs Dzu = 0 and full-column-rank Bu");
      cls = "singular-control";
      break;
    case DesignMode::sof_singular_filtering:
      if (!singular_filtering_applies(plant))
        throw NoConvexClassApplies("singular-filtering class needs Dyw = 0 and full-row-rank Cy");
      cls = "singular-filtering";
      break;
    default: {
      const auto c = req.mask ? std::optional<std::string>("structural") : detect_sof_class(plant);
      if (!c)
        throw NoConvexClassApplies(
            "static output feedback needs vanishing Tyu, Dzu = 0 with full-column-rank Bu, or Dyw = 0 with "
            "full-row-rank Cy");
      cls = *c;
    }
  }
  return run_sof_class(req, plant, cls);
}

SynthesisReport synthesize_fixed_order(const SynthesisRequest& req) {
  const PlantRealization& plant = req.plant;
  plant.check_dimensions();
  if (req.order < 0) throw std::invalid_argument("controller order must be >= 0");
  if (req.order == 0) {
    SynthesisRequest r0 = req;
    r0.mode = DesignMode::sof_auto;
    SynthesisReport r = synthesize_sof(r0);
    r.mode = DesignMode::fixed_order;
    return r;
  }
  require_admissible(plant, req.allow_marginal);
  const PlantRealization aug = augment_fixed_order(plant, req.order);
  std::string cls;
  if (singular_control_applies(aug))
    cls = "singular-control";
  else if (singular_filtering_applies(aug))
    cls = "singular-filtering";
  else
    throw NoConvexClassApplies("augmented plant has neither Dzu = 0 with full-column-rank Bu nor Dyw = 0 with "
                               "full-row-rank Cy");

  SynthesisRequest ra = req;
  ra.validate = false;
  ra.allow_marginal = true;
  SynthesisReport r = run_sof_class(ra, aug, cls);
  r.mode = DesignMode::fixed_order;
  if (!r.ok()) return r;

  // Validate the unpacked compensator on the original plant.
  const ControllerRealization ctrl = balance_controller(plant, unpack_controller(r.controller.Dc, req.order));
  SynthesisReport v =
      req.validate ? validate_design(plant, ctrl, req.a, r.gamma, req.solver, req.quadrature) : r;
  if (!req.validate) {
    v.controller = ctrl;
    v.closed_loop = close_loop_dynamic(plant, ctrl);
    v.spectral_radius = v.closed_loop.spectral_radius();
    v.stable = v.spectral_radius < 1.0;
  }
  v.mode = DesignMode::fixed_order;
  v.design_class = cls;
  v.gamma_min = r.gamma_min;
  v.gain_condition = r.gain_condition;
  v.solver_status = r.solver_status;
  v.iterations = r.iterations;
  v.solver_gap = r.solver_gap;
  v.wall_time = r.wall_time;
  return v;
}

SynthesisReport synthesize(const SynthesisRequest& req) {
  switch (req.mode) {
    case DesignMode::state_feedback: return synthesize_state_feedback(req);
    case DesignMode::full_order: return synthesize_full_order(req);
    case DesignMode::fixed_order: return synthesize_fixed_order(req);
    default: return synthesize_sof(req);
  }
}

std::vector<SynthesisReport> synthesize_sweep(const SynthesisRequest& req, const std::vector<double>& levels) {
  std::vector<SynthesisReport> reps;
  reps.reserve(levels.size());
  for (double a : levels) {
    SynthesisRequest r = req;
    r.a = a;
    reps.push_back(synthesize(r));
  }
  std::vector<size_t> order(levels.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) { return levels[i] < levels[j]; });
  const PlantRealization& plant = req.plant;
  for (size_t k = order.size(); k-- > 1;) {
    const SynthesisReport& hi = reps[order[k]];
    SynthesisReport& lo = reps[order[k - 1]];
    if (!hi.ok() || (lo.ok() && lo.gamma <= hi.gamma)) continue;
    const SynthesisReport v =
        validate_design(plant, hi.controller, lo.a, hi.gamma, req.solver, req.quadrature);
    if (!v.ok()) continue;
    SynthesisReport adopted = hi;
    adopted.a = lo.a;
    adopted.closed_loop = v.closed_loop;
    adopted.certified = v.certified;
    adopted.certified_gamma = v.certified_gamma;
    adopted.oracle = v.oracle;
    adopted.gamma_min = lo.ok() ? lo.gamma_min : 0.0;
    adopted.message = "controller designed at a = " + std::to_string(hi.a) + " adopted: " + v.message;
    lo = std::move(adopted);
  }
  return reps;
}

}  // namespace aniso
