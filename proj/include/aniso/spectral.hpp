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
#ifndef ANISO_SPECTRAL_HPP
#define ANISO_SPECTRAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "aniso/statespace.hpp"

namespace aniso {

// Value of a system norm with the method that produced it and the achieved
// (estimated) relative accuracy.
struct NormCertificate {
  double value = 0.0;
  std::string kind;    // "h2", "hinf", "anisotropic"
  std::string method;  // "lyapunov", "sweep", "brl-bisection", "frequency-domain"
  double tolerance = 0.0;
  long grid_points = 0;
};

// Shaping filters share the realization type of closed loops.
using ShapingFilter = ClosedLoopRealization;

// Uniform periodic trapezoid grid on [0, 2*pi) with `initial_points` nodes,
// doubled while successive estimates differ by more than rel_tol.
struct QuadratureSpec {
  long initial_points = 4096;
  long max_points = 1L << 18;
  double rel_tol = 1e-8;
};

// F(e^{i omega}) = D + C (e^{i omega} I - A)^-1 B.
Eigen::MatrixXcd frequency_response(const ClosedLoopRealization& sys, double omega);

// Solves A X A' - X + Q = 0 for Schur-stable A (squared Smith iteration).
MatrixXd dlyap(const MatrixXd& A, const MatrixXd& Q);

NormCertificate h2_norm(const ClosedLoopRealization& sys);

// Internally balanced realization (equal diagonal Gramians, square-root
// method). States whose Hankel singular value is below rel_tol times the
// largest are truncated; this moves any system norm by at most twice their
// sum. A system with no significant state is returned diagonally scaled.
ClosedLoopRealization balanced_realization(const ClosedLoopRealization& sys, double rel_tol = 1e-12,
                                           VectorXd* hankel_singular_values = nullptr);

// Dense sweep of the largest singular value with local golden-section
// refinement; a lower bound on the H-infinity norm.
NormCertificate hinf_sweep(const ClosedLoopRealization& sys, int points = 2048);

// Bisection on the bounded-real LMI seeded by the sweep; the returned value is
// the smallest certified-feasible gamma found.
NormCertificate hinf_norm(const ClosedLoopRealization& sys, double rel_tol = 1e-6);

// Mean anisotropy of the sequence produced by G from white noise, clamped at
// zero. Throws SingularSpectrum when det(G G*) vanishes on the grid.
double mean_anisotropy(const ShapingFilter& G, const QuadratureSpec& quad = {});

// Frequency-domain a-anisotropic norm: parametric worst-case filter, bisection
// on the scalar parameter q, trapezoidal quadrature with grid doubling.
NormCertificate anisotropic_norm_oracle(const ClosedLoopRealization& sys, double a, const QuadratureSpec& quad = {});

}  // namespace aniso

#endif
