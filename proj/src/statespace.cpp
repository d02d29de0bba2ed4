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
#include "aniso/statespace.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

namespace aniso {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionMismatch(what);
}

std::string shape(const MatrixXd& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

double max_abs(const MatrixXd& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

// Orthonormal basis of range(M) with rank decided relative to `scale`.
MatrixXd orth(const MatrixXd& M, double tol) {
  if (M.cols() == 0 || M.rows() == 0) return MatrixXd(M.rows(), 0);
  Eigen::JacobiSVD<MatrixXd> svd(M, Eigen::ComputeThinU);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthogonal completion: [Q1 Q2] orthogonal with Q1 spanning the given columns.
MatrixXd complete_basis(const MatrixXd& Q1) {
  const int n = static_cast<int>(Q1.rows());
  Eigen::HouseholderQR<MatrixXd> qr(Q1);
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, n);
  Q.leftCols(Q1.cols()) = Q1;
  return Q;
}

}  // namespace

void PlantRealization::check_dimensions() const {
  const auto n = A.rows();
  require(A.cols() == n, "A must be square, got " + shape(A));
  require(Bw.rows() == n, "Bw must have " + std::to_string(n) + " rows, got " + shape(Bw));
  require(Bu.rows() == n, "Bu must have " + std::to_string(n) + " rows, got " + shape(Bu));
  require(Cz.cols() == n, "Cz must have " + std::to_string(n) + " columns, got " + shape(Cz));
  require(Cy.cols() == n, "Cy must have " + std::to_string(n) + " columns, got " + shape(Cy));
  require(Dzw.rows() == Cz.rows() && Dzw.cols() == Bw.cols(),
          "Dzw must be " + std::to_string(Cz.rows()) + "x" + std::to_string(Bw.cols()) + ", got " + shape(Dzw));
  require(Dzu.rows() == Cz.rows() && Dzu.cols() == Bu.cols(),
          "Dzu must be " + std::to_string(Cz.rows()) + "x" + std::to_string(Bu.cols()) + ", got " + shape(Dzu));
  require(Dyw.rows() == Cy.rows() && Dyw.cols() == Bw.cols(),
          "Dyw must be " + std::to_string(Cy.rows()) + "x" + std::to_string(Bw.cols()) + ", got " + shape(Dyw));
  require(Bw.cols() > 0, "plant needs at least one disturbance input");
  require(Cz.rows() > 0, "plant needs at least one controlled output");
}

PlantRealization PlantRealization::full_information(const MatrixXd& A, const MatrixXd& Bw, const MatrixXd& Bu,
                                                    const MatrixXd& Cz, const MatrixXd& Dzw, const MatrixXd& Dzu) {
  PlantRealization p{A, Bw, Bu, Cz, Dzw, Dzu, MatrixXd::Identity(A.rows(), A.rows()),
                     MatrixXd::Zero(A.rows(), Bw.cols())};
  p.check_dimensions();
  return p;
}

ControllerRealization ControllerRealization::static_gain(const MatrixXd& K) {
  return {MatrixXd(0, 0), MatrixXd(0, K.cols()), MatrixXd(K.rows(), 0), K};
}

void ClosedLoopRealization::check_dimensions() const {
  require(A.rows() == A.cols(), "closed-loop A must be square, got " + shape(A));
  require(B.rows() == A.rows(), "closed-loop B has wrong row count: " + shape(B));
  require(C.cols() == A.rows(), "closed-loop C has wrong column count: " + shape(C));
  require(D.rows() == C.rows() && D.cols() == B.cols(), "closed-loop D has wrong shape: " + shape(D));
}

double spectral_radius(const MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> es(M, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double ClosedLoopRealization::spectral_radius() const { return aniso::spectral_radius(A); }

double pbh_margin(const MatrixXd& A, const MatrixXd& B, std::vector<std::complex<double>>* weak_modes,
                  double rel_tol) {
  const auto n = A.rows();
  if (n == 0) return std::numeric_limits<double>::infinity();
  MatrixXd AB(n, n + B.cols());
  AB << A, B;
  const double scale = std::max(1.0, Eigen::JacobiSVD<MatrixXd>(AB).singularValues()(0));
  Eigen::EigenSolver<MatrixXd> es(A, false);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const std::complex<double> lam = es.eigenvalues()(i);
    if (std::abs(lam) < 1.0) continue;
    Eigen::MatrixXcd M(n, n + B.cols());
    M.leftCols(n) = A.cast<std::complex<double>>() - lam * Eigen::MatrixXcd::Identity(n, n);
    M.rightCols(B.cols()) = B.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const double s = svd.singularValues()(n - 1) / scale;
    if (s <= rel_tol && weak_modes) weak_modes->push_back(lam);
    margin = std::min(margin, s);
  }
  return margin;
}

ValidationReport validate_plant(const PlantRealization& plant, double rel_tol) {
  plant.check_dimensions();
  ValidationReport r;
  r.pz_le_mw = plant.pz() <= plant.mw();
  if (!r.pz_le_mw) r.messages.push_back("controlled output dimension exceeds disturbance dimension");
  r.stabilizability_margin = pbh_margin(plant.A, plant.Bu, &r.uncontrollable_modes, rel_tol);
  r.detectability_margin =
      pbh_margin(plant.A.transpose(), plant.Cy.transpose(), &r.unobservable_modes, rel_tol);
  r.stabilizable = r.stabilizability_margin > rel_tol;
  r.detectable = r.detectability_margin > rel_tol;
  // Within three decades of the rank tolerance the verdict is fragile.
  r.marginal = (r.stabilizable && r.stabilizability_margin < 1e3 * rel_tol) ||
               (r.detectable && r.detectability_margin < 1e3 * rel_tol);
  if (!r.stabilizable) r.messages.push_back("(A, Bu) is not stabilizable");
  if (!r.detectable) r.messages.push_back("(A, Cy) is not detectable");
  if (r.marginal) r.messages.push_back("plant is close to losing stabilizability/detectability");
  return r;
}

ClosedLoopRealization open_loop(const PlantRealization& p) {
  p.check_dimensions();
  return {p.A, p.Bw, p.Cz, p.Dzw};
}

ClosedLoopRealization close_loop_state_feedback(const PlantRealization& p, const MatrixXd& K) {
  p.check_dimensions();
  require(K.rows() == p.mu() && K.cols() == p.nx(),
          "state-feedback gain must be " + std::to_string(p.mu()) + "x" + std::to_string(p.nx()) + ", got " +
              shape(K));
  return {p.A + p.Bu * K, p.Bw, p.Cz + p.Dzu * K, p.Dzw};
}

ClosedLoopRealization close_loop_static_output(const PlantRealization& p, const MatrixXd& K) {
  p.check_dimensions();
  require(K.rows() == p.mu() && K.cols() == p.py(),
          "output-feedback gain must be " + std::to_string(p.mu()) + "x" + std::to_string(p.py()) + ", got " +
              shape(K));
  return {p.A + p.Bu * K * p.Cy, p.Bw + p.Bu * K * p.Dyw, p.Cz + p.Dzu * K * p.Cy, p.Dzw + p.Dzu * K * p.Dyw};
}

ClosedLoopRealization close_loop_dynamic(const PlantRealization& p, const ControllerRealization& c) {
  p.check_dimensions();
  const int n = p.nx(), k = c.order();
  require(c.Ac.cols() == k && c.Bc.rows() == k && c.Cc.cols() == k, "controller state matrices inconsistent");
  require(c.Bc.cols() == p.py() && c.Dc.cols() == p.py(), "controller input dimension must equal py");
  require(c.Cc.rows() == p.mu() && c.Dc.rows() == p.mu(), "controller output dimension must equal mu");
  if (k == 0) return close_loop_static_output(p, c.Dc);
  ClosedLoopRealization cl;
  cl.A.resize(n + k, n + k);
  cl.A << p.A + p.Bu * c.Dc * p.Cy, p.Bu * c.Cc, c.Bc * p.Cy, c.Ac;
  cl.B.resize(n + k, p.mw());
  cl.B << p.Bw + p.Bu * c.Dc * p.Dyw, c.Bc * p.Dyw;
  cl.C.resize(p.pz(), n + k);
  cl.C << p.Cz + p.Dzu * c.Dc * p.Cy, p.Dzu * c.Cc;
  cl.D = p.Dzw + p.Dzu * c.Dc * p.Dyw;
  return cl;
}

PlantRealization augment_fixed_order(const PlantRealization& p, int nxi) {
  p.check_dimensions();
  if (nxi < 0) throw DimensionMismatch("controller order must be nonnegative");
  if (nxi == 0) return p;
  const int n = p.nx(), mw = p.mw(), mu = p.mu(), pz = p.pz(), py = p.py();
  PlantRealization a;
  a.A = MatrixXd::Zero(n + nxi, n + nxi);
  a.A.topLeftCorner(n, n) = p.A;
  a.Bw = MatrixXd::Zero(n + nxi, mw);
  a.Bw.topRows(n) = p.Bw;
  a.Bu = MatrixXd::Zero(n + nxi, nxi + mu);
  a.Bu.topRightCorner(n, mu) = p.Bu;
  a.Bu.bottomLeftCorner(nxi, nxi).setIdentity();
  a.Cz = MatrixXd::Zero(pz, n + nxi);
  a.Cz.leftCols(n) = p.Cz;
  a.Dzw = p.Dzw;
  a.Dzu = MatrixXd::Zero(pz, nxi + mu);
  a.Dzu.rightCols(mu) = p.Dzu;
  a.Cy = MatrixXd::Zero(nxi + py, n + nxi);
  a.Cy.topRightCorner(nxi, nxi).setIdentity();
  a.Cy.bottomLeftCorner(py, n) = p.Cy;
  a.Dyw = MatrixXd::Zero(nxi + py, mw);
  a.Dyw.bottomRows(py) = p.Dyw;
  return a;
}

MatrixXd pack_controller(const ControllerRealization& c) {
  const int k = c.order();
  MatrixXd K(k + c.Dc.rows(), k + c.Dc.cols());
  K << c.Ac, c.Bc, c.Cc, c.Dc;
  return K;
}

ControllerRealization unpack_controller(const MatrixXd& K, int nxi) {
  require(nxi >= 0 && K.rows() >= nxi && K.cols() >= nxi, "packed gain too small for requested order");
  const auto mu = K.rows() - nxi, py = K.cols() - nxi;
  return {K.topLeftCorner(nxi, nxi), K.topRightCorner(nxi, py), K.bottomLeftCorner(mu, nxi),
          K.bottomRightCorner(mu, py)};
}

PlantRealization apply_transform(const PlantRealization& p, const MatrixXd& T, const MatrixXd& Ti) {
  return {T * p.A * Ti, T * p.Bw, T * p.Bu, p.Cz * Ti, p.Dzw, p.Dzu, p.Cy * Ti, p.Dyw};
}

bool tyu_vanishes(const PlantRealization& p, double rel_tol) {
  p.check_dimensions();
  const double scale = std::max(1.0, max_abs(p.A)), tol = rel_tol * std::max(1.0, max_abs(p.Bu) * max_abs(p.Cy));
  MatrixXd AkB = p.Bu;
  for (int k = 0; k < std::max(1, p.nx()); ++k) {
    if (max_abs(p.Cy * AkB) > tol * std::pow(scale, k)) return false;
    AkB = p.A * AkB;
  }
  return true;
}

int controllable_subspace(const MatrixXd& A, const MatrixXd& B, MatrixXd& V, double rel_tol) {
  const auto n = A.rows();
  const double tol = rel_tol * std::max({1.0, max_abs(A), max_abs(B)}) * static_cast<double>(n);
  MatrixXd basis = orth(B, tol);
  MatrixXd last = basis;
  // Block Arnoldi with re-orthogonalization: each new block is the part of
  // A * (previous block) outside the current span.
  while (last.cols() > 0 && basis.cols() < n) {
    MatrixXd W = A * last;
    for (int pass = 0; pass < 2; ++pass) W -= basis * (basis.transpose() * W);
    last = orth(W, tol);
    if (last.cols() == 0) break;
    MatrixXd grown(n, basis.cols() + last.cols());
    grown << basis, last;
    basis = grown;
  }
  const int r = static_cast<int>(basis.cols());
  V = complete_basis(basis);
  return r;
}

StructuralTransform decompose_vanishing_tyu(const PlantRealization& p, double rel_tol) {
  if (!tyu_vanishes(p, rel_tol))
    throw StructuralPropertyViolation("transfer u -> y does not vanish (nonzero Markov parameter Cy A^k Bu)");
  const int n = p.nx();
  MatrixXd V;
  const int n1 = controllable_subspace(p.A, p.Bu, V, rel_tol);
  const double tol = 1e3 * rel_tol * std::max({1.0, max_abs(p.A), max_abs(p.Bu), max_abs(p.Cy)});

  StructuralTransform st{TransformKind::vanishing_tyu, MatrixXd::Identity(n, n), MatrixXd::Identity(n, n), n1, 1.0};
  // Keep the identity when the plant is already in the canonical pattern.
  const bool canonical = max_abs(p.A.bottomLeftCorner(n - n1, n1)) <= tol &&
                         max_abs(p.Bu.bottomRows(n - n1)) <= tol && max_abs(p.Cy.leftCols(n1)) <= tol;
  if (!canonical) {
    st.T = V.transpose();
    st.T_inv = V;
  }
  PlantRealization t = apply_transform(p, st.T, st.T_inv);
  if (max_abs(t.A.bottomLeftCorner(n - n1, n1)) > tol || max_abs(t.Bu.bottomRows(n - n1)) > tol ||
      max_abs(t.Cy.leftCols(n1)) > tol)
    throw StructuralPropertyViolation("controllability staircase failed to reach the canonical pattern");
  if (n - n1 > 0 && spectral_radius(t.A.bottomRightCorner(n - n1, n - n1)) >= 1.0)
    throw StructuralPropertyViolation("uncontrollable block A22 is not stable");
  return st;
}

StructuralTransform transform_singular_control(const PlantRealization& p, double rel_tol) {
  p.check_dimensions();
  const int n = p.nx(), m = p.mu();
  const double tol = rel_tol * std::max(1.0, max_abs(p.Bu));
  if (max_abs(p.Dzu) > rel_tol * std::max(1.0, max_abs(p.Cz)))
    throw StructuralPropertyViolation("singular control requires Dzu = 0");
  if (m == 0 || m > n) throw RankViolation("singular control requires 0 < mu <= nx");
  Eigen::JacobiSVD<MatrixXd> svd(p.Bu);
  if (svd.singularValues()(m - 1) <= tol * n) throw RankViolation("Bu must have full column rank");

  StructuralTransform st{TransformKind::singular_control, MatrixXd::Identity(n, n), MatrixXd::Identity(n, n), m, 1.0};
  MatrixXd target = MatrixXd::Zero(n, m);
  target.topRows(m).setIdentity();
  if ((p.Bu - target).cwiseAbs().maxCoeff() <= tol) return st;

  Eigen::HouseholderQR<MatrixXd> qr(p.Bu);
  const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, n);
  const MatrixXd R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  MatrixXd S = MatrixXd::Identity(n, n), Si = MatrixXd::Identity(n, n);
  S.topLeftCorner(m, m) = R.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(m, m));
  Si.topLeftCorner(m, m) = R;
  st.T = S * Q.transpose();
  st.T_inv = Q * Si;
  Eigen::JacobiSVD<MatrixXd> sv(st.T);
  st.condition_number = sv.singularValues()(0) / sv.singularValues()(n - 1);
  return st;
}

StructuralTransform transform_singular_filtering(const PlantRealization& p, double rel_tol) {
  p.check_dimensions();
  const int n = p.nx(), m = p.py();
  const double tol = rel_tol * std::max(1.0, max_abs(p.Cy));
  if (max_abs(p.Dyw) > rel_tol * std::max(1.0, max_abs(p.Bw)))
    throw StructuralPropertyViolation("singular filtering requires Dyw = 0");
  if (m == 0 || m > n) throw RankViolation("singular filtering requires 0 < py <= nx");
  Eigen::JacobiSVD<MatrixXd> svd(p.Cy);
  if (svd.singularValues()(m - 1) <= tol * n) throw RankViolation("Cy must have full row rank");

  StructuralTransform st{TransformKind::singular_filtering, MatrixXd::Identity(n, n), MatrixXd::Identity(n, n), m,
                         1.0};
  MatrixXd target = MatrixXd::Zero(m, n);
  target.leftCols(m).setIdentity();
  if ((p.Cy - target).cwiseAbs().maxCoeff() <= tol) return st;

  // Cy' = Q [R; 0]  =>  Cy = [R' 0] Q'.
  const MatrixXd CyT = p.Cy.transpose();
  Eigen::HouseholderQR<MatrixXd> qr(CyT);
  const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, n);
  const MatrixXd R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  MatrixXd S = MatrixXd::Identity(n, n), Si = MatrixXd::Identity(n, n);
  S.topLeftCorner(m, m) = R.transpose();
  Si.topLeftCorner(m, m) = R.transpose().triangularView<Eigen::Lower>().solve(MatrixXd::Identity(m, m));
  st.T = S * Q.transpose();
  st.T_inv = Q * Si;
  Eigen::JacobiSVD<MatrixXd> sv(st.T);
  st.condition_number = sv.singularValues()(0) / sv.singularValues()(n - 1);
  return st;
}

PlantRealization dual_plant(const PlantRealization& p) {
  p.check_dimensions();
  return {p.A.transpose(),   p.Cz.transpose(),  p.Cy.transpose(),  p.Bw.transpose(),
          p.Dzw.transpose(), p.Dyw.transpose(), p.Bu.transpose(),  p.Dzu.transpose()};
}

VectorXd balancing_scaling(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, int first) {
  const int n = static_cast<int>(A.rows());
  VectorXd d = VectorXd::Ones(n);
  MatrixXd M = A;
  MatrixXd Bs = B, Cs = C;
  // Osborne iteration with power-of-two factors (exact in floating point).
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool changed = false;
    for (int i = first; i < n; ++i) {
      double c = Cs.col(i).squaredNorm(), r = Bs.row(i).squaredNorm();
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += M(j, i) * M(j, i);
        r += M(i, j) * M(i, j);
      }
      c = std::sqrt(c);
      r = std::sqrt(r);
      if (c == 0.0 || r == 0.0) continue;
      const double f = std::exp2(std::round(0.5 * std::log2(r / c)));
      // f scales column i up and row i down: x_i = f * x_i_new.
      if (f != 1.0 && (c * f + r / f) < 0.95 * (c + r)) {
        M.col(i) *= f;
        M.row(i) /= f;
        Cs.col(i) *= f;
        Bs.row(i) /= f;
        d(i) *= f;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return d;
}

ClosedLoopRealization balance(const ClosedLoopRealization& sys) {
  sys.check_dimensions();
  const VectorXd d = balancing_scaling(sys.A, sys.B, sys.C, 0);
  return {d.cwiseInverse().asDiagonal() * sys.A * d.asDiagonal(), d.cwiseInverse().asDiagonal() * sys.B,
          sys.C * d.asDiagonal(), sys.D};
}

ControllerRealization balance_controller(const PlantRealization& plant, const ControllerRealization& ctrl) {
  if (ctrl.order() == 0) return ctrl;
  const ClosedLoopRealization cl = close_loop_dynamic(plant, ctrl);
  const VectorXd d = balancing_scaling(cl.A, cl.B, cl.C, plant.nx()).tail(ctrl.order());
  return {d.cwiseInverse().asDiagonal() * ctrl.Ac * d.asDiagonal(), d.cwiseInverse().asDiagonal() * ctrl.Bc,
          ctrl.Cc * d.asDiagonal(), ctrl.Dc};
}

}  // namespace aniso
