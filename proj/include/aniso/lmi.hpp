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
#ifndef ANISO_LMI_HPP
#define ANISO_LMI_HPP

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aniso/statespace.hpp"

namespace aniso::lmi {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Matrix-valued affine function of the decision coordinates:
//   M(x) = M0 + sum_i x_i M_i.
// Only affine operations are provided, so products of decision variables
// cannot be formed.
class AffineMatrix {
 public:
  AffineMatrix() = default;
  AffineMatrix(int rows, int cols) : c_(MatrixXd::Zero(rows, cols)) {}
  AffineMatrix(const MatrixXd& constant) : c_(constant) {}  // NOLINT: implicit on purpose

  static AffineMatrix zero(int rows, int cols) { return AffineMatrix(rows, cols); }
  static AffineMatrix identity(int n) { return AffineMatrix(MatrixXd::Identity(n, n)); }
  static AffineMatrix scalar(double v) { return AffineMatrix(MatrixXd::Constant(1, 1, v)); }
  static AffineMatrix coordinate(int coord, const MatrixXd& coef);

  int rows() const { return static_cast<int>(c_.rows()); }
  int cols() const { return static_cast<int>(c_.cols()); }
  const MatrixXd& constant() const { return c_; }
  const std::map<int, MatrixXd>& terms() const { return t_; }
  bool is_constant() const { return t_.empty(); }

  void add_term(int coord, const MatrixXd& coef);
  MatrixXd evaluate(const VectorXd& x) const;
  double value(const VectorXd& x) const;  // 1x1 only

  AffineMatrix transpose() const;
  AffineMatrix block(int r, int c, int nr, int nc) const;
  // Symmetric part (M + M')/2; exact for structurally symmetric expressions.
  AffineMatrix symmetrized() const;
  bool is_symmetric(double tol = 0.0) const;
  // max |entry| over the constant part
  double data_norm() const;

  AffineMatrix& operator+=(const AffineMatrix& o);
  AffineMatrix& operator-=(const AffineMatrix& o);
  AffineMatrix& operator*=(double s);

  friend AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b) { return a += b; }
  friend AffineMatrix operator-(AffineMatrix a, const AffineMatrix& b) { return a -= b; }
  friend AffineMatrix operator-(AffineMatrix a) { return a *= -1.0; }
  friend AffineMatrix operator*(double s, AffineMatrix a) { return a *= s; }
  friend AffineMatrix operator*(const MatrixXd& L, const AffineMatrix& a);
  friend AffineMatrix operator*(const AffineMatrix& a, const MatrixXd& R);

 private:
  MatrixXd c_;
  std::map<int, MatrixXd> t_;
};

// Dense block assembly; every row/column of blocks must be consistent.
AffineMatrix hstack(const std::vector<AffineMatrix>& parts);
AffineMatrix vstack(const std::vector<AffineMatrix>& parts);

// Symmetric block matrix from its lower triangle; unset blocks are zero and
// the upper triangle is filled with transposes, so symmetry is structural.
class SymmetricBlocks {
 public:
  explicit SymmetricBlocks(std::vector<int> sizes);
  void set(int i, int j, const AffineMatrix& m);  // i >= j
  AffineMatrix build() const;

 private:
  std::vector<int> sizes_;
  std::map<std::pair<int, int>, AffineMatrix> lower_;
};

enum class Sense { negative_definite, positive_definite };
enum class Structure { symmetric, full, patterned, scalar };

struct MatrixVariable {
  std::string name;
  int rows = 0, cols = 0;
  Structure structure = Structure::full;
  std::vector<int> coords;  // row-major, -1 for entries fixed at zero
  bool auxiliary = false;
};

struct AffineBlock {
  std::string name;
  AffineMatrix expr;
  Sense sense = Sense::negative_definite;
  bool strict = true;
  double margin = 0.0;  // strict blocks: expr <= -margin I or >= margin I
};

// scale * u <= scale * det(psi)^(1/m); the hypograph scalar is t = scale * u.
struct DetRootTerm {
  std::string name;
  AffineMatrix psi;
  double scale = 1.0;
  int hypograph = -1;  // coordinate of u
};

// Linear objective, LMI blocks and det-root hypograph terms.
class MaxdetProblem {
 public:
  AffineMatrix symmetric(const std::string& name, int n);
  AffineMatrix full(const std::string& name, int rows, int cols);
  // Entries with mask == 0 are fixed at zero and get no coordinate.
  AffineMatrix patterned(const std::string& name, const MatrixXd& mask);
  AffineMatrix scalar(const std::string& name);

  void constrain(const std::string& name, const AffineMatrix& expr, Sense sense, bool strict = true);
  // Returns the hypograph t = scale * u as an affine scalar.
  AffineMatrix detroot(const std::string& name, const AffineMatrix& psi, double scale);
  void minimize(const AffineMatrix& objective);

  int num_coords() const { return ncoords_; }
  const std::vector<MatrixVariable>& variables() const { return vars_; }
  const std::vector<AffineBlock>& blocks() const { return blocks_; }
  std::vector<AffineBlock>& blocks() { return blocks_; }
  const std::vector<DetRootTerm>& detroots() const { return detroots_; }
  const VectorXd& objective() const { return c_; }
  double objective_offset() const { return c0_; }
  bool has_objective() const { return has_objective_; }

  bool has_variable(const std::string& name) const;
  const MatrixVariable& variable_info(const std::string& name) const;
  AffineMatrix variable(const std::string& name) const;
  MatrixXd value(const std::string& name, const VectorXd& x) const;

  // Free-form annotations (fixed gamma_hat, entropy scale, margins, ...).
  std::map<std::string, double> meta;
  // Named affine expressions of the coordinates (e.g. eta, gamma_hat).
  std::map<std::string, AffineMatrix> expressions;

  // Internal: allocate auxiliary coordinates during encoding.
  int allocate(int count);
  void add_variable(MatrixVariable v) { vars_.push_back(std::move(v)); }
  void clear_detroots() { detroots_.clear(); }

 private:
  AffineMatrix make_variable(MatrixVariable v);

  int ncoords_ = 0;
  std::vector<MatrixVariable> vars_;
  std::vector<AffineBlock> blocks_;
  std::vector<DetRootTerm> detroots_;
  VectorXd c_;
  double c0_ = 0.0;
  bool has_objective_ = false;
};

// Returns a copy whose strict blocks carry margin eps * (1 + ||data||).
MaxdetProblem strictness_margin(const MaxdetProblem& problem, double eps);

// Geometric-mean tower for one det-root term: lower-triangular Z with
// [psi Z; Z' diag(Z)] >= 0, pairwise 2x2 cones up to the root r and u <= r.
// Adds auxiliary variables and blocks to `problem`.
void encode_detroot(const DetRootTerm& term, MaxdetProblem& problem);
// Copy with every det-root term replaced by its conic encoding.
MaxdetProblem encode_detroots(const MaxdetProblem& problem);

struct BlockResidual {
  std::string name;
  double extreme_eigenvalue = 0.0;  // max eig for negative blocks, min eig for positive ones
  double margin = 0.0;
  bool satisfied = false;
};

struct ResidualReport {
  std::vector<BlockResidual> blocks;
  // scale * det(psi)^(1/m) - t for each det-root term (>= -tol when satisfied)
  std::vector<double> detroot_slack;
  double objective = 0.0;
  bool all_satisfied = true;
  double worst_violation = 0.0;
};

// Evaluates the original (unencoded) constraints at x.
ResidualReport check_point(const MaxdetProblem& problem, const VectorXd& x, double tol = 1e-8);

// Deterministic JSON text of variables, blocks, det-root terms and objective.
std::string dump_problem(const MaxdetProblem& problem);

// ---------------------------------------------------------------------------
// Problem builders. `gamma` fixes the bound gamma (gamma_hat = gamma^2, pure
// feasibility); std::nullopt minimizes gamma_hat.
//
// For a > 0 the problems carry eta = gamma_hat + s * eta_excess (expression
// "eta"), Psi and a det-root term. At a = 0 the infimum sits at eta -> inf, so
// the builders emit the limit form instead: variable Xi = lim (eta I - Psi),
// constraint tr(Xi)/m < gamma_hat, -Xi in place of Psi - eta I, and the
// -eta I rows/columns removed (meta "limit_form" = 1).

inline double entropy_scale(double a, int mw) { return std::exp(-2.0 * a / mw); }

// Single-Lyapunov analysis of a fixed stable system; convex in (eta, Psi, Phi).
MaxdetProblem build_sanbrl(const ClosedLoopRealization& sys, double a, std::optional<double> gamma,
                           double eps = 1e-7);

// Full-information state feedback, K = Lambda Pi^-1.
MaxdetProblem build_state_feedback(const PlantRealization& plant, double a, std::optional<double> gamma,
                                   double eps = 1e-7);

// Full-order dynamic output feedback in linearized variables
// (Pi11, Phi11, Ac_hat, Bc_hat, Cc_hat, Dc_hat).
MaxdetProblem build_full_order(const PlantRealization& plant, double a, std::optional<double> gamma,
                               double eps = 1e-7);

// Static output feedback for vanishing Tyu; `plant` must already be in the
// canonical pattern with leading block size n1. Optional 0/1 mask on K.
MaxdetProblem build_sof_structural(const PlantRealization& plant, int n1, double a, std::optional<double> gamma,
                                   const std::optional<MatrixXd>& mask = std::nullopt, double eps = 1e-7);

// Singular control: Dzu = 0 and Bu = [I; 0]. K = S1^-1 L1.
MaxdetProblem build_sof_singular_control(const PlantRealization& plant, double a, std::optional<double> gamma,
                                         double eps = 1e-7);

// Singular filtering: Dyw = 0 and Cy = [I 0]. K = M1 R1^-1.
MaxdetProblem build_sof_singular_filtering(const PlantRealization& plant, double a, std::optional<double> gamma,
                                           double eps = 1e-7);

// Reciprocal (Phi, Pi) form of the analysis conditions at a fixed system.
// Exposed as an evaluator only; the pair is never optimized jointly.
// eta = +inf selects the a = 0 limit form, with `Psi` holding Xi.
struct ReciprocalResidual {
  double lmi3_max_eig = 0.0;
  double lmi4_max_eig = 0.0;
  double det_slack = 0.0;      // eta - scale*det(Psi)^(1/m) - gamma_hat, or tr(Xi)/m - gamma_hat (< 0 when satisfied)
  double reciprocity = 0.0;    // ||Phi Pi - I||
};
ReciprocalResidual evaluate_reciprocal_conditions(const ClosedLoopRealization& sys, double a, double gamma_hat,
                                                  double eta, const MatrixXd& Psi, const MatrixXd& Phi,
                                                  const MatrixXd& Pi);

}  // namespace aniso::lmi

#endif
