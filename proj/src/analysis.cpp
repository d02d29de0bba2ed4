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
#include "aniso/analysis.hpp"

#include <chrono>
#include <cmath>

#include "aniso/lmi.hpp"

namespace aniso {

AnalysisReport analyze(const ClosedLoopRealization& sys, double a, std::optional<double> gamma,
                       const solver::Options& opts, const QuadratureSpec& quad) {
  const auto t0 = std::chrono::steady_clock::now();
  sys.check_dimensions();
  if (a < 0.0) throw std::invalid_argument("anisotropy level must be nonnegative");
  if (gamma && !(*gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  AnalysisReport r;
  r.a = a;
  r.gamma_tested = gamma;
  r.spectral_radius = sys.spectral_radius();
  if (!(r.spectral_radius < 1.0))
    throw UnstableSystem("system is not Schur stable (spectral radius " + std::to_string(r.spectral_radius) + ")");
  r.h2 = h2_norm(sys);
  r.hinf = hinf_norm(sys);
  r.oracle = anisotropic_norm_oracle(sys, a, quad);

  double scale = gamma ? *gamma : r.oracle.value;
  if (!(scale > 0.0)) scale = 1.0;
  ClosedLoopRealization normalized = sys;
  normalized.C /= scale;
  normalized.D /= scale;
  normalized = balanced_realization(normalized);
  const lmi::MaxdetProblem p = lmi::build_sanbrl(normalized, a, gamma ? std::optional<double>(1.0) : std::nullopt);
  const solver::Solution s = solver::solve(p, opts);
  r.solver_status = s.status;
  r.iterations = s.iterations;
  r.message = s.message;
  const bool point = s.has_point() && solver::verify(p, s).all_satisfied;
  r.feasible = point;
  if (gamma) {
    r.gamma = *gamma;
    r.gamma_hat = *gamma * *gamma;
  } else if (point) {
    r.gamma_hat = scale * scale * s.objective;
    r.gamma = std::sqrt(std::max(0.0, r.gamma_hat));
    r.gamma_lower = scale * std::sqrt(std::max(0.0, s.dual_bound));
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace aniso
