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
#ifndef ANISO_STATESPACE_HPP
#define ANISO_STATESPACE_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "aniso/errors.hpp"

namespace aniso {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Generalized discrete-time plant
//   x+ = A x + Bw w + Bu u
//   z  = Cz x + Dzw w + Dzu u
//   y  = Cy x + Dyw w          (Dyu = 0 by construction)
struct PlantRealization {
  MatrixXd A, Bw, Bu, Cz, Dzw, Dzu, Cy, Dyw;

  int nx() const { return static_cast<int>(A.rows()); }
  int mw() const { return static_cast<int>(Bw.cols()); }
  int mu() const { return static_cast<int>(Bu.cols()); }
  int pz() const { return static_cast<int>(Cz.rows()); }
  int py() const { return static_cast<int>(Cy.rows()); }

  // Throws DimensionMismatch.
  void check_dimensions() const;

  // Cy = I, Dyw = 0.
  static PlantRealization full_information(const MatrixXd& A, const MatrixXd& Bw, const MatrixXd& Bu,
                                           const MatrixXd& Cz, const MatrixXd& Dzw, const MatrixXd& Dzu);
};

// x_c+ = Ac x_c + Bc y,  u = Cc x_c + Dc y.  Static gains have order 0.
struct ControllerRealization {
  MatrixXd Ac, Bc, Cc, Dc;

  int order() const { return static_cast<int>(Ac.rows()); }
  static ControllerRealization static_gain(const MatrixXd& K);
};

// Stable LTI map w -> z.
struct ClosedLoopRealization {
  MatrixXd A, B, C, D;

  int order() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int outputs() const { return static_cast<int>(C.rows()); }
  void check_dimensions() const;
  double spectral_radius() const;
  bool is_stable() const { return spectral_radius() < 1.0; }
};

struct ValidationReport {
  bool dimensions_consistent = true;
  bool pz_le_mw = true;
  bool stabilizable = true;
  bool detectable = true;
  // Smallest normalized PBH singular value over |lambda| >= 1; +inf when none.
  double stabilizability_margin = 0.0;
  double detectability_margin = 0.0;
  bool marginal = false;
  std::vector<std::complex<double>> uncontrollable_modes;
  std::vector<std::complex<double>> unobservable_modes;
  std::vector<std::string> messages;

  bool admissible() const { return dimensions_consistent && stabilizable && detectable; }
};

// PBH rank tests on the unstable/marginal spectrum. Throws DimensionMismatch.
ValidationReport validate_plant(const PlantRealization& plant, double rel_tol = 1e-8);

// Smallest singular value of [A - lambda I, B] relative to ||[A, B]|| over
// eigenvalues with |lambda| >= 1 (infinity if there are none).
double pbh_margin(const MatrixXd& A, const MatrixXd& B, std::vector<std::complex<double>>* weak_modes = nullptr,
                  double rel_tol = 1e-8);

ClosedLoopRealization open_loop(const PlantRealization& plant);
ClosedLoopRealization close_loop_state_feedback(const PlantRealization& plant, const MatrixXd& K);
ClosedLoopRealization close_loop_dynamic(const PlantRealization& plant, const ControllerRealization& ctrl);
ClosedLoopRealization close_loop_static_output(const PlantRealization& plant, const MatrixXd& K);

// Fixed-order augmentation: a dynamic controller of order n_xi becomes the
// static gain [Ac Bc; Cc Dc] of an augmented plant.
PlantRealization augment_fixed_order(const PlantRealization& plant, int n_xi);
MatrixXd pack_controller(const ControllerRealization& ctrl);
ControllerRealization unpack_controller(const MatrixXd& K, int n_xi);

enum class TransformKind { vanishing_tyu, singular_control, singular_filtering };

// x_bar = T x.  `split` is the size of the leading block.
struct StructuralTransform {
  TransformKind kind;
  MatrixXd T, T_inv;
  int split = 0;
  double condition_number = 1.0;
};

// Plant expressed in new coordinates x_bar = T x (inputs/outputs unchanged).
PlantRealization apply_transform(const PlantRealization& plant, const MatrixXd& T, const MatrixXd& T_inv);

// Markov parameters Cy A^k Bu, k = 0..n-1, all below tol * scale.
bool tyu_vanishes(const PlantRealization& plant, double rel_tol = 1e-10);

// Orthogonal controllability staircase of (A, Bu). The transformed plant has
// A21 = 0, Bu2 = 0 and Cy1 = 0 (zeroed exactly); A22 must be stable.
StructuralTransform decompose_vanishing_tyu(const PlantRealization& plant, double rel_tol = 1e-10);

// T Bu = [I; 0]. Requires Dzu = 0 and full column rank Bu.
StructuralTransform transform_singular_control(const PlantRealization& plant, double rel_tol = 1e-10);

// Cy T^-1 = [I 0]. Requires Dyw = 0 and full row rank Cy.
StructuralTransform transform_singular_filtering(const PlantRealization& plant, double rel_tol = 1e-10);

// Transposed plant used by the control/filtering duality:
// (A, Bw, Bu, Cz, Dzw, Dzu, Cy, Dyw) -> (A', Cz', Cy', Bw', Dzw', Dyw', Bu', Dzu').
PlantRealization dual_plant(const PlantRealization& plant);

// Diagonal state scaling d (powers of two) equalizing the row and column
// norms of [A B; C 0] for states first..n-1; the balanced realization is
// (D^-1 A D, D^-1 B, C D) with D = diag(d).
VectorXd balancing_scaling(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, int first = 0);
ClosedLoopRealization balance(const ClosedLoopRealization& sys);
// Rescales the controller states to balance the closed loop; same transfer function.
ControllerRealization balance_controller(const PlantRealization& plant, const ControllerRealization& ctrl);

// Spectral radius of a square matrix.
double spectral_radius(const MatrixXd& M);

// Dimension of the controllable subspace of (A, B) with orthonormal basis in
// the leading columns of V.
int controllable_subspace(const MatrixXd& A, const MatrixXd& B, MatrixXd& V, double rel_tol = 1e-10);

}  // namespace aniso

#endif
