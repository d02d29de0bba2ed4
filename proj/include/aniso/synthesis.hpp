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
#ifndef ANISO_SYNTHESIS_HPP
#define ANISO_SYNTHESIS_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "aniso/lmi.hpp"
#include "aniso/solver.hpp"
#include "aniso/spectral.hpp"
#include "aniso/statespace.hpp"

namespace aniso {

enum class DesignMode {
  state_feedback,
  full_order,
  sof_auto,  // first applicable convex static-output-feedback class
  sof_structural,
  sof_singular_control,
  sof_singular_filtering,
  fixed_order,
};
std::string to_string(DesignMode m);
DesignMode design_mode_from_string(const std::string& s);

struct SynthesisRequest {
  PlantRealization plant;
  DesignMode mode = DesignMode::state_feedback;
  double a = 0.0;
  std::optional<double> gamma;          // fixed bound; nullopt minimizes gamma
  int order = 0;                        // fixed-order controller size
  std::optional<MatrixXd> mask;         // 0/1 pattern on K (structural class only)
  solver::Options solver;
  double eps = 1e-7;                    // strictness margin
  // Optimal-gamma designs stop the interior-point method at this relative
  // gap and recover the controller from that iterate, which keeps the
  // Lyapunov variables off the boundary of the feasible set.
  double recovery_gap = 1e-6;
  double bound_slack = 1e-2;  // accepted relative excess of the closed-loop analysis bound
  bool allow_marginal = false;          // proceed on near-unstabilizable plants
  bool validate = true;
  QuadratureSpec quadrature;
};

enum class SynthesisStatus { success, infeasible, numerical_failure };
std::string to_string(SynthesisStatus s);

struct SynthesisReport {
  SynthesisStatus status = SynthesisStatus::numerical_failure;
  std::string message;
  DesignMode mode = DesignMode::state_feedback;
  std::string design_class;  // resolved theorem class for output feedback
  double a = 0.0;
  double gamma = 0.0;        // achieved bound
  double gamma_hat = 0.0;    // gamma^2
  double gamma_min = 0.0;    // lower bound on the optimum from the dual
  ControllerRealization controller;
  ClosedLoopRealization closed_loop;
  double spectral_radius = 0.0;
  bool stable = false;

  // Post-hoc validation of the closed loop.
  bool certified = false;            // analysis LMIs feasible at gamma
  double certified_gamma = 0.0;      // minimized analysis bound of the closed loop
  NormCertificate oracle, h2, hinf;

  // Recovery diagnostics.
  double gain_condition = 0.0;          // of the inverted factor (Pi, S1, R1, ...)
  double coupling_min_singular = 0.0;   // full order: smallest sigma of I - Pi11 Phi11
  // Max eigenvalue of the analysis LMIs at the recovered loop and Lyapunov
  // pair, where the design variables determine that pair.
  std::optional<double> reconstruction_residual;

  // Solver diagnostics of the main solve.
  solver::Status solver_status = solver::Status::numerical_failure;
  int iterations = 0;
  double solver_gap = 0.0;
  double wall_time = 0.0;

  bool ok() const { return status == SynthesisStatus::success; }
};

SynthesisReport synthesize(const SynthesisRequest& req);

SynthesisReport synthesize_state_feedback(const SynthesisRequest& req);
SynthesisReport synthesize_full_order(const SynthesisRequest& req);
// Structural, singular-control, singular-filtering or auto-detected class.
SynthesisReport synthesize_sof(const SynthesisRequest& req);
// Order-n_xi compensator via augmentation; order 0 is plain static output feedback.
SynthesisReport synthesize_fixed_order(const SynthesisRequest& req);

// Designs at every level of `levels` (any order). The anisotropic norm is
// nondecreasing in a, so a controller certified at a higher level also
// bounds every lower one; when a higher level achieved a smaller gamma its
// controller is re-validated at the lower level and adopted. The returned
// reports follow the order of `levels`, and successful ones have gamma
// nondecreasing in a.
std::vector<SynthesisReport> synthesize_sweep(const SynthesisRequest& req, const std::vector<double>& levels);

// Closes the loop and fills the validation fields (stability, certified bound,
// oracle, H2, H-infinity). Status is success only for a stable loop whose
// analysis LMIs are feasible at `gamma`: the minimized analysis bound is
// computed and must not exceed gamma (feasibility is monotone in gamma).
// `rel_tol` absorbs the solver's duality gap.
SynthesisReport validate_design(const PlantRealization& plant, const ControllerRealization& ctrl, double a,
                                double gamma, const solver::Options& opts = {}, const QuadratureSpec& quad = {},
                                double rel_tol = 1e-4);

// Which convex static-output-feedback class applies to the plant, if any
// ("structural", "singular-control", "singular-filtering").
std::optional<std::string> detect_sof_class(const PlantRealization& plant);

// Full-order recovery from the linearized variables. Returns the controller
// and the closed-loop Lyapunov pair (Phi, Pi = Phi^-1).
struct FullOrderRecovery {
  ControllerRealization controller;
  MatrixXd Phi, Pi;
  double coupling_min_singular = 0.0;
};
FullOrderRecovery recover_full_order(const PlantRealization& plant, const MatrixXd& Pi11, const MatrixXd& Phi11,
                                     const MatrixXd& Ac_hat, const MatrixXd& Bc_hat, const MatrixXd& Cc_hat,
                                     const MatrixXd& Dc_hat, double rel_tol = 1e-14);

}  // namespace aniso

#endif
