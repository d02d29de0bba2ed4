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
#ifndef ANISO_ANALYSIS_HPP
#define ANISO_ANALYSIS_HPP

#include <optional>
#include <string>

#include "aniso/solver.hpp"
#include "aniso/spectral.hpp"
#include "aniso/statespace.hpp"

namespace aniso {

struct AnalysisReport {
  double a = 0.0;
  std::optional<double> gamma_tested;  // set for feasibility queries
  bool feasible = false;               // LMIs strictly feasible (at gamma_tested, if given)
  double gamma = 0.0;                  // minimized bound (minimization queries)
  double gamma_hat = 0.0;
  double gamma_lower = 0.0;            // dual lower bound on the minimized bound
  NormCertificate oracle, h2, hinf;
  double spectral_radius = 0.0;
  solver::Status solver_status = solver::Status::numerical_failure;
  std::string message;
  int iterations = 0;
  double wall_time = 0.0;
};

// Anisotropic-norm analysis of a stable system by the SANBRL program: with
// `gamma` a feasibility verdict, without it the minimized bound. The system is
// balanced and its output normalized (by gamma or by the oracle value) before
// solving; reported numbers refer to the original scaling. Throws
// UnstableSystem for rho(A) >= 1.
AnalysisReport analyze(const ClosedLoopRealization& sys, double a, std::optional<double> gamma = std::nullopt,
                       const solver::Options& opts = {}, const QuadratureSpec& quad = {});

}  // namespace aniso

#endif
