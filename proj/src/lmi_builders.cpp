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
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "aniso/lmi.hpp"

namespace aniso::lmi {

namespace {

using Sb = SymmetricBlocks;

MatrixXd I(int n) { return MatrixXd::Identity(n, n); }
MatrixXd mI(int n) { return -MatrixXd::Identity(n, n); }
MatrixXd O(int r, int c) { return MatrixXd::Zero(r, c); }

// s * I_n for a scalar expression s.
AffineMatrix times_identity(const AffineMatrix& s, int n) {
  AffineMatrix out(MatrixXd(s.constant()(0, 0) * I(n)));
  for (const auto& [k, c] : s.terms()) out.add_term(k, c(0, 0) * I(n));
  return out;
}

AffineMatrix blockdiag(const AffineMatrix& a, const AffineMatrix& b) {
  return vstack({hstack({a, AffineMatrix(O(a.rows(), b.cols()))}), hstack({AffineMatrix(O(b.rows(), a.cols())), b})});
}

void check_args(double a, const std::optional<double>& gamma) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("mean anisotropy level must be finite and >= 0");
  if (gamma && !(*gamma > 0.0 && std::isfinite(*gamma)))
    throw std::invalid_argument("gamma must be finite and positive");
}

double max_abs(const MatrixXd& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

// Variables and scalar constraints shared by every form of the conditions:
//   Psi > 0,  eta > gamma_hat,  eta - t < gamma_hat,  t <= s det(Psi)^(1/m).
// With t = s u the pair of scalar inequalities is written through the excess
// eta = gamma_hat + s zeta, 0 < zeta < u, which stays well scaled when s is
// tiny (large a) instead of squeezing eta - gamma_hat below rounding level.
//
// At a = 0 the infimum is reached only as eta -> infinity. There the conditions
// are replaced by their limit in Xi = eta I - Psi: tr(Xi)/m < gamma_hat, the
// block Psi - eta I becomes -Xi and the rows/columns carrying -eta I drop out.
// Both forms have the same strictly feasible set in gamma_hat and the
// remaining variables (AM-GM on det(eta I - Xi)^(1/m) as eta grows).
struct Anisotropy {
  bool limit = false;
  AffineMatrix eta, Psi, Xi, gamma_hat;

  // The (w, w) block Psi - eta I of the inverse-form LMIs.
  AffineMatrix w_block(int m) const { return limit ? -Xi : Psi - times_identity(eta, m); }
  AffineMatrix minus_eta(int m) const { return limit ? AffineMatrix(mI(m)) : -times_identity(eta, m); }
};

Anisotropy anisotropy_terms(MaxdetProblem& p, int mw, double a, const std::optional<double>& gamma) {
  Anisotropy v;
  v.gamma_hat = gamma ? AffineMatrix::scalar(*gamma * *gamma) : p.scalar("gamma_hat");
  p.expressions["gamma_hat"] = v.gamma_hat;
  p.meta["a"] = a;
  if (gamma) p.meta["gamma_hat"] = *gamma * *gamma;
  if (a == 0.0) {
    v.limit = true;
    v.Xi = p.symmetric("Xi", mw);
    AffineMatrix trace = AffineMatrix::scalar(0.0);
    for (int i = 0; i < mw; ++i) trace += v.Xi.block(i, i, 1, 1);
    p.meta["entropy_scale"] = 1.0;
    p.meta["limit_form"] = 1.0;
    p.constrain("trace_bound", v.gamma_hat - (1.0 / mw) * trace, Sense::positive_definite);
    if (!gamma) p.minimize(v.gamma_hat);
    return v;
  }
  const AffineMatrix zeta = p.scalar("eta_excess");
  v.Psi = p.symmetric("Psi", mw);
  const double s = entropy_scale(a, mw);
  v.eta = v.gamma_hat + s * zeta;
  p.expressions["eta"] = v.eta;
  p.meta["entropy_scale"] = s;
  const AffineMatrix t = p.detroot("detroot", v.Psi, s);
  p.constrain("Psi", v.Psi, Sense::positive_definite);
  p.constrain("eta_above_gamma", zeta, Sense::positive_definite);
  p.constrain("det_bound", (1.0 / s) * t - zeta, Sense::positive_definite);
  if (!gamma) p.minimize(v.gamma_hat);
  return v;
}

// Removes block row/column k of a block matrix with the given block sizes.
AffineMatrix drop_block(const AffineMatrix& M, const std::vector<int>& sizes, int k) {
  std::vector<std::pair<int, int>> keep;  // (offset, size)
  int off = 0;
  for (int i = 0; i < static_cast<int>(sizes.size()); ++i) {
    if (i != k && sizes[i] > 0) keep.emplace_back(off, sizes[i]);
    off += sizes[i];
  }
  std::vector<AffineMatrix> rows;
  for (const auto& [ro, rs] : keep) {
    std::vector<AffineMatrix> cols;
    for (const auto& [co, cs] : keep) cols.push_back(M.block(ro, co, rs, cs));
    rows.push_back(hstack(cols));
  }
  return vstack(rows);
}

// Lyapunov-form LMI whose block k carries -eta I; the block is absent in the
// limit form.
void constrain_lyapunov_form(MaxdetProblem& p, const Anisotropy& v, const std::string& name, const Sb& blocks,
                             const std::vector<int>& sizes, int k) {
  const AffineMatrix M = blocks.build();
  p.constrain(name, v.limit ? drop_block(M, sizes, k) : M, Sense::negative_definite);
}

void constrain_nonempty(MaxdetProblem& p, const std::string& name, const AffineMatrix& e, Sense s) {
  if (e.rows() > 0) p.constrain(name, e, s);
}

}  // namespace

MaxdetProblem build_sanbrl(const ClosedLoopRealization& sys, double a, std::optional<double> gamma, double eps) {
  sys.check_dimensions();
  check_args(a, gamma);
  if (sys.spectral_radius() >= 1.0) throw UnstableSystem("analysis requires a stable system");
  const int n = sys.order(), m = sys.inputs();
  const MatrixXd &A = sys.A, &B = sys.B, &C = sys.C, &D = sys.D;

  MaxdetProblem p;
  const Anisotropy v = anisotropy_terms(p, m, a, gamma);
  const AffineMatrix Phi = p.symmetric("Phi", n);

  Sb lyap({n, m});
  lyap.set(0, 0, A.transpose() * Phi * A - Phi + AffineMatrix(MatrixXd(C.transpose() * C)));
  lyap.set(1, 0, B.transpose() * Phi * A + AffineMatrix(MatrixXd(D.transpose() * C)));
  lyap.set(1, 1, B.transpose() * Phi * B + AffineMatrix(MatrixXd(D.transpose() * D)) + v.minus_eta(m));
  constrain_lyapunov_form(p, v, "lyapunov", lyap, {n, m}, 1);
  p.constrain("psi_bound",
              v.w_block(m) + B.transpose() * Phi * B + AffineMatrix(MatrixXd(D.transpose() * D)),
              Sense::negative_definite);
  constrain_nonempty(p, "Phi", Phi, Sense::positive_definite);
  return strictness_margin(p, eps);
}

MaxdetProblem build_state_feedback(const PlantRealization& plant, double a, std::optional<double> gamma,
                                   double eps) {
  plant.check_dimensions();
  check_args(a, gamma);
  const int n = plant.nx(), mw = plant.mw(), mu = plant.mu(), pz = plant.pz();
  MaxdetProblem p;
  const Anisotropy v = anisotropy_terms(p, mw, a, gamma);
  const AffineMatrix Pi = p.symmetric("Pi", n);
  const AffineMatrix Lambda = p.full("Lambda", mu, n);

  Sb l3({mw, n, pz});
  l3.set(0, 0, v.w_block(mw));
  l3.set(1, 0, plant.Bw);
  l3.set(1, 1, -Pi);
  l3.set(2, 0, plant.Dzw);
  l3.set(2, 2, mI(pz));
  p.constrain("lmi3", l3.build(), Sense::negative_definite);

  const std::vector<int> s4{n, mw, n, pz};
  Sb l4(s4);
  l4.set(0, 0, -Pi);
  l4.set(1, 1, v.minus_eta(mw));
  l4.set(2, 0, plant.A * Pi + plant.Bu * Lambda);
  l4.set(2, 1, plant.Bw);
  l4.set(2, 2, -Pi);
  l4.set(3, 0, plant.Cz * Pi + plant.Dzu * Lambda);
  l4.set(3, 1, plant.Dzw);
  l4.set(3, 3, mI(pz));
  constrain_lyapunov_form(p, v, "lmi4", l4, s4, 1);
  p.constrain("Pi", Pi, Sense::positive_definite);
  return strictness_margin(p, eps);
}

MaxdetProblem build_full_order(const PlantRealization& plant, double a, std::optional<double> gamma, double eps) {
  plant.check_dimensions();
  check_args(a, gamma);
  const int n = plant.nx(), mw = plant.mw(), mu = plant.mu(), pz = plant.pz(), py = plant.py();
  const MatrixXd &A = plant.A, &Bw = plant.Bw, &Bu = plant.Bu, &Cz = plant.Cz, &Dzw = plant.Dzw, &Dzu = plant.Dzu,
                 &Cy = plant.Cy, &Dyw = plant.Dyw;
  MaxdetProblem p;
  const Anisotropy v = anisotropy_terms(p, mw, a, gamma);
  const AffineMatrix Pi11 = p.symmetric("Pi11", n);
  const AffineMatrix Phi11 = p.symmetric("Phi11", n);
  const AffineMatrix Ah = p.full("Ac_hat", n, n);
  const AffineMatrix Bh = p.full("Bc_hat", n, py);
  const AffineMatrix Ch = p.full("Cc_hat", mu, n);
  const AffineMatrix Dh = p.full("Dc_hat", mu, py);

  const AffineMatrix Bcl1 = AffineMatrix(Bw) + Bu * Dh * Dyw;     // Bw + Bu Dc Dyw
  const AffineMatrix Bcl2 = Phi11 * Bw + Bh * Dyw;               // Phi11 Bw + Bc_hat Dyw
  const AffineMatrix Dcl = AffineMatrix(Dzw) + Dzu * Dh * Dyw;    // Dzw + Dzu Dc Dyw

  Sb l3({mw, n, n, pz});
  l3.set(0, 0, v.w_block(mw));
  l3.set(1, 0, Bcl1);
  l3.set(1, 1, -Pi11);
  l3.set(2, 0, Bcl2);
  l3.set(2, 1, mI(n));
  l3.set(2, 2, -Phi11);
  l3.set(3, 0, Dcl);
  l3.set(3, 3, mI(pz));
  p.constrain("lmi3", l3.build(), Sense::negative_definite);

  const std::vector<int> s4{n, n, mw, n, n, pz};
  Sb l4(s4);
  l4.set(0, 0, -Pi11);
  l4.set(1, 0, mI(n));
  l4.set(1, 1, -Phi11);
  l4.set(2, 2, v.minus_eta(mw));
  l4.set(3, 0, A * Pi11 + Bu * Ch);
  l4.set(3, 1, AffineMatrix(A) + Bu * Dh * Cy);
  l4.set(3, 2, Bcl1);
  l4.set(3, 3, -Pi11);
  l4.set(4, 0, Ah);
  l4.set(4, 1, Phi11 * A + Bh * Cy);
  l4.set(4, 2, Bcl2);
  l4.set(4, 3, mI(n));
  l4.set(4, 4, -Phi11);
  l4.set(5, 0, Cz * Pi11 + Dzu * Ch);
  l4.set(5, 1, AffineMatrix(Cz) + Dzu * Dh * Cy);
  l4.set(5, 2, Dcl);
  l4.set(5, 5, mI(pz));
  constrain_lyapunov_form(p, v, "lmi4", l4, s4, 2);

  Sb cpl({n, n});
  cpl.set(0, 0, Pi11);
  cpl.set(1, 0, I(n));
  cpl.set(1, 1, Phi11);
  p.constrain("coupling", cpl.build(), Sense::positive_definite);
  p.constrain("Pi11", Pi11, Sense::positive_definite);
  p.constrain("Phi11", Phi11, Sense::positive_definite);
  return strictness_margin(p, eps);
}

MaxdetProblem build_sof_structural(const PlantRealization& plant, int n1, double a, std::optional<double> gamma,
                                   const std::optional<MatrixXd>& mask, double eps) {
  plant.check_dimensions();
  check_args(a, gamma);
  const int n = plant.nx(), mw = plant.mw(), mu = plant.mu(), pz = plant.pz(), py = plant.py();
  if (n1 < 0 || n1 > n) throw DimensionMismatch("partition size out of range");
  const int n2 = n - n1;
  const double tol = 1e-9 * std::max({1.0, max_abs(plant.A), max_abs(plant.Bu), max_abs(plant.Cy)});
  if (max_abs(plant.A.bottomLeftCorner(n2, n1)) > tol || max_abs(plant.Bu.bottomRows(n2)) > tol ||
      max_abs(plant.Cy.leftCols(n1)) > tol)
    throw StructuralPropertyViolation("plant is not in the vanishing-Tyu canonical pattern");
  if (mask && (mask->rows() != mu || mask->cols() != py))
    throw DimensionMismatch("gain mask must be " + std::to_string(mu) + "x" + std::to_string(py));

  const MatrixXd A11 = plant.A.topLeftCorner(n1, n1), A12 = plant.A.topRightCorner(n1, n2),
                 A22 = plant.A.bottomRightCorner(n2, n2);
  const MatrixXd Bw1 = plant.Bw.topRows(n1), Bw2 = plant.Bw.bottomRows(n2), Bu1 = plant.Bu.topRows(n1);
  const MatrixXd Cz1 = plant.Cz.leftCols(n1), Cz2 = plant.Cz.rightCols(n2), Cy2 = plant.Cy.rightCols(n2);
  const MatrixXd &Dzw = plant.Dzw, &Dzu = plant.Dzu, &Dyw = plant.Dyw;

  MaxdetProblem p;
  const Anisotropy v = anisotropy_terms(p, mw, a, gamma);
  const AffineMatrix Q = p.symmetric("Q", n1);
  const AffineMatrix R = p.symmetric("R", n2);
  const AffineMatrix S = p.full("S", n1, n2);
  const AffineMatrix K = mask ? p.patterned("K", *mask) : p.full("K", mu, py);

  const AffineMatrix top_w = AffineMatrix(Bw1) + Bu1 * K * Dyw - S * Bw2;  // Bw1 + Bu1 K Dyw - S Bw2
  const AffineMatrix Dcl = AffineMatrix(Dzw) + Dzu * K * Dyw;

  Sb l3({mw, n1, n2, pz});
  l3.set(0, 0, v.w_block(mw));
  l3.set(1, 0, top_w);
  l3.set(1, 1, -Q);
  l3.set(2, 0, R * Bw2);
  l3.set(2, 2, -R);
  l3.set(3, 0, Dcl);
  l3.set(3, 3, mI(pz));
  p.constrain("lmi3", l3.build(), Sense::negative_definite);

  const std::vector<int> s4{n1, n2, mw, n1, n2, pz};
  Sb l4(s4);
  l4.set(0, 0, -Q);
  l4.set(1, 1, -R);
  l4.set(2, 2, v.minus_eta(mw));
  l4.set(3, 0, A11 * Q);
  l4.set(3, 1, A11 * S - S * A22 + AffineMatrix(A12) + Bu1 * K * Cy2);
  l4.set(3, 2, top_w);
  l4.set(3, 3, -Q);
  l4.set(4, 1, R * A22);
  l4.set(4, 2, R * Bw2);
  l4.set(4, 4, -R);
  l4.set(5, 0, Cz1 * Q);
  l4.set(5, 1, Cz1 * S + AffineMatrix(Cz2) + Dzu * K * Cy2);
  l4.set(5, 2, Dcl);
  l4.set(5, 5, mI(pz));
  constrain_lyapunov_form(p, v, "lmi4", l4, s4, 2);
  constrain_nonempty(p, "Q", Q, Sense::positive_definite);
  constrain_nonempty(p, "R", R, Sense::positive_definite);
  p.meta["n1"] = n1;
  return strictness_margin(p, eps);
}

MaxdetProblem build_sof_singular_control(const PlantRealization& plant, double a, std::optional<double> gamma,
                                         double eps) {
  plant.check_dimensions();
  check_args(a, gamma);
  const int n = plant.nx(), mw = plant.mw(), mu = plant.mu(), pz = plant.pz(), py = plant.py();
  if (mu == 0 || mu > n) throw RankViolation("singular control requires 0 < mu <= nx");
  MatrixXd target = O(n, mu);
  target.topRows(mu) = I(mu);
  if (max_abs(plant.Dzu) > 1e-12 * std::max(1.0, max_abs(plant.Cz)))
    throw StructuralPropertyViolation("singular control requires Dzu = 0");
  if (max_abs(plant.Bu - target) > 1e-9)
    throw StructuralPropertyViolation("singular control builder expects Bu = [I; 0]");

  MaxdetProblem p;
  const Anisotropy v = anisotropy_terms(p, mw, a, gamma);
  const AffineMatrix Phi = p.symmetric("Phi_bar", n);
  const AffineMatrix S1 = p.full("S1", mu, mu);
  const AffineMatrix S2 = p.full("S2", n - mu, n - mu);
  const AffineMatrix L1 = p.full("L1", mu, py);
  const AffineMatrix S = blockdiag(S1, S2);
  const AffineMatrix L = vstack({L1, AffineMatrix(O(n - mu, py))});

  const AffineMatrix SB = S * plant.Bw + L * plant.Dyw;
  const AffineMatrix mid = Phi - S - S.transpose();

  Sb l3({mw, n, pz});
  l3.set(0, 0, v.w_block(mw));
  l3.set(1, 0, SB);
  l3.set(1, 1, mid);
  l3.set(2, 0, plant.Dzw);
  l3.set(2, 2, mI(pz));
  p.constrain("lmi3", l3.build(), Sense::negative_definite);

  const std::vector<int> s4{n, mw, n, pz};
  Sb l4(s4);
  l4.set(0, 0, -Phi);
  l4.set(1, 1, v.minus_eta(mw));
  l4.set(2, 0, S * plant.A + L * plant.Cy);
  l4.set(2, 1, SB);
  l4.set(2, 2, mid);
  l4.set(3, 0, plant.Cz);
  l4.set(3, 1, plant.Dzw);
  l4.set(3, 3, mI(pz));
  constrain_lyapunov_form(p, v, "lmi4", l4, s4, 1);
  p.constrain("Phi_bar", Phi, Sense::positive_definite);
  return strictness_margin(p, eps);
}

MaxdetProblem build_sof_singular_filtering(const PlantRealization& plant, double a, std::optional<double> gamma,
                                           double eps) {
  plant.check_dimensions();
  check_args(a, gamma);
  const int n = plant.nx(), mw = plant.mw(), mu = plant.mu(), pz = plant.pz(), py = plant.py();
  if (py == 0 || py > n) throw RankViolation("singular filtering requires 0 < py <= nx");
  MatrixXd target = O(py, n);
  target.leftCols(py) = I(py);
  if (max_abs(plant.Dyw) > 1e-12 * std::max(1.0, max_abs(plant.Bw)))
    throw StructuralPropertyViolation("singular filtering requires Dyw = 0");
  if (max_abs(plant.Cy - target) > 1e-9)
    throw StructuralPropertyViolation("singular filtering builder expects Cy = [I 0]");

  MaxdetProblem p;
  const Anisotropy v = anisotropy_terms(p, mw, a, gamma);
  const AffineMatrix Pi = p.symmetric("Pi_bar", n);
  const AffineMatrix R1 = p.full("R1", py, py);
  const AffineMatrix R2 = p.full("R2", n - py, n - py);
  const AffineMatrix M1 = p.full("M1", mu, py);
  const AffineMatrix R = blockdiag(R1, R2);
  const AffineMatrix M = hstack({M1, AffineMatrix(O(mu, n - py))});

  Sb l3({mw, n, pz});
  l3.set(0, 0, v.w_block(mw));
  l3.set(1, 0, plant.Bw);
  l3.set(1, 1, -Pi);
  l3.set(2, 0, plant.Dzw);
  l3.set(2, 2, mI(pz));
  p.constrain("lmi3", l3.build(), Sense::negative_definite);

  const std::vector<int> s4{n, mw, n, pz};
  Sb l4(s4);
  l4.set(0, 0, Pi - R - R.transpose());
  l4.set(1, 1, v.minus_eta(mw));
  l4.set(2, 0, plant.A * R + plant.Bu * M);
  l4.set(2, 1, plant.Bw);
  l4.set(2, 2, -Pi);
  l4.set(3, 0, plant.Cz * R + plant.Dzu * M);
  l4.set(3, 1, plant.Dzw);
  l4.set(3, 3, mI(pz));
  constrain_lyapunov_form(p, v, "lmi4", l4, s4, 1);
  p.constrain("Pi_bar", Pi, Sense::positive_definite);
  return strictness_margin(p, eps);
}

ReciprocalResidual evaluate_reciprocal_conditions(const ClosedLoopRealization& sys, double a, double gamma_hat,
                                                  double eta, const MatrixXd& Psi, const MatrixXd& Phi,
                                                  const MatrixXd& Pi) {
  sys.check_dimensions();
  const int n = sys.order(), m = sys.inputs(), p = sys.outputs();
  const bool limit = std::isinf(eta);
  ReciprocalResidual r;
  MatrixXd L3 = MatrixXd::Zero(m + n + p, m + n + p);
  L3.block(0, 0, m, m) = limit ? MatrixXd(-Psi) : MatrixXd(Psi - eta * I(m));
  L3.block(m, 0, n, m) = sys.B;
  L3.block(m + n, 0, p, m) = sys.D;
  L3.block(m, m, n, n) = -Pi;
  L3.block(m + n, m + n, p, p) = -I(p);
  L3 = L3.selfadjointView<Eigen::Lower>();

  const int mw = limit ? 0 : m;
  MatrixXd L4 = MatrixXd::Zero(2 * n + mw + p, 2 * n + mw + p);
  L4.block(0, 0, n, n) = -Phi;
  L4.block(n + mw, 0, n, n) = sys.A;
  L4.block(n + mw, n + mw, n, n) = -Pi;
  L4.block(2 * n + mw, 0, p, n) = sys.C;
  L4.block(2 * n + mw, 2 * n + mw, p, p) = -I(p);
  if (!limit) {
    L4.block(n, n, m, m) = -eta * I(m);
    L4.block(n + m, n, n, m) = sys.B;
    L4.block(2 * n + m, n, p, m) = sys.D;
  }
  L4 = L4.selfadjointView<Eigen::Lower>();

  auto lmax = [](const MatrixXd& S) {
    if (S.size() == 0) return -std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  };
  r.lmi3_max_eig = lmax(L3);
  r.lmi4_max_eig = lmax(L4);
  if (limit) {
    r.det_slack = Psi.trace() / m - gamma_hat;
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXd> ps(0.5 * (Psi + Psi.transpose()), Eigen::EigenvaluesOnly);
    double root = 0.0;
    if (ps.eigenvalues().minCoeff() > 0.0) root = std::exp(ps.eigenvalues().array().log().sum() / m);
    r.det_slack = eta - entropy_scale(a, m) * root - gamma_hat;
  }
  r.reciprocity = (Phi * Pi - I(n)).norm();
  return r;
}

}  // namespace aniso::lmi
