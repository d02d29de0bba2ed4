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
#include "aniso/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aniso/lmi.hpp"
#include "aniso/solver.hpp"

namespace aniso {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_stable(const ClosedLoopRealization& sys) {
  sys.check_dimensions();
  if (sys.spectral_radius() >= 1.0) throw UnstableSystem("system is not Schur stable (spectral radius >= 1)");
}

// Complex Schur form so that each frequency costs a triangular solve.
class ResponseEvaluator {
 public:
  explicit ResponseEvaluator(const ClosedLoopRealization& sys) : D_(sys.D.cast<std::complex<double>>()) {
    const int n = sys.order();
    if (n > 0) {
      Eigen::ComplexSchur<Eigen::MatrixXcd> cs(sys.A.cast<std::complex<double>>());
      T_ = cs.matrixT();
      const Eigen::MatrixXcd U = cs.matrixU();
      B_ = U.adjoint() * sys.B.cast<std::complex<double>>();
      C_ = sys.C.cast<std::complex<double>>() * U;
    }
  }

  Eigen::MatrixXcd operator()(double omega) const {
    if (T_.rows() == 0) return D_;
    const std::complex<double> z = std::polar(1.0, omega);
    Eigen::MatrixXcd M = -T_;
    M.diagonal().array() += z;
    return D_ + C_ * M.triangularView<Eigen::Upper>().solve(B_);
  }

 private:
  Eigen::MatrixXcd T_, B_, C_, D_;
};

double sigma_max(const Eigen::MatrixXcd& F) {
  if (F.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(F);
  return svd.singularValues()(0);
}

// Eigenvalues of F* F on the half grid k = 0..N/2 with trapezoid weights
// (summing to one over the full period).
struct SpectrumTable {
  long N = 0;
  int m = 0;
  std::vector<double> weight;
  std::vector<double> lambda;  // row-major [k][j]
  double lambda_max = 0.0;
};

SpectrumTable spectrum_table(const ResponseEvaluator& F, int m, long N) {
  SpectrumTable t;
  t.N = N;
  t.m = m;
  const long half = N / 2;
  t.weight.resize(half + 1);
  t.lambda.resize((half + 1) * m);
  for (long k = 0; k <= half; ++k) {
    const double omega = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(N);
    const Eigen::MatrixXcd Fk = F(omega);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Fk.adjoint() * Fk, Eigen::EigenvaluesOnly);
    for (int j = 0; j < m; ++j) {
      const double l = std::max(0.0, es.eigenvalues()(j));
      t.lambda[k * m + j] = l;
      t.lambda_max = std::max(t.lambda_max, l);
    }
    t.weight[k] = ((k == 0 || k == half) ? 1.0 : 2.0) / static_cast<double>(N);
  }
  return t;
}

struct OraclePoint {
  double T = 0.0, logsum = 0.0;
};

OraclePoint evaluate_q(const SpectrumTable& t, double q) {
  OraclePoint p;
  const size_t K = t.weight.size();
  for (size_t k = 0; k < K; ++k) {
    double sT = 0.0, sL = 0.0;
    for (int j = 0; j < t.m; ++j) {
      const double r = 1.0 - q * t.lambda[k * t.m + j];
      sT += 1.0 / r;
      sL -= std::log(r);
    }
    p.T += t.weight[k] * sT;
    p.logsum += t.weight[k] * sL;
  }
  return p;
}

double anisotropy_of(const OraclePoint& p, int m) { return 0.5 * m * std::log(p.T / m) - 0.5 * p.logsum; }

double norm_of(const OraclePoint& p, int m, double q) {
  return q > 0.0 ? std::sqrt(std::max(0.0, (1.0 - m / p.T) / q)) : 0.0;
}

// One solve of the oracle on a fixed grid.
double oracle_on_grid(const SpectrumTable& t, double a, double peak2) {
  const int m = t.m;
  const double qmax = (1.0 - 1e-9) / std::max(peak2, t.lambda_max);
  const OraclePoint top = evaluate_q(t, qmax);
  if (anisotropy_of(top, m) < a) return norm_of(top, m, qmax);
  double lo = 0.0, hi = qmax, a_lo = 0.0, a_hi = anisotropy_of(top, m);
  for (int it = 0; it < 60 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double am = anisotropy_of(evaluate_q(t, mid), m);
    // a(q) is nondecreasing for any nonnegative weights (Cauchy-Schwarz).
    if (am < a_lo - 1e-12 * std::max(1.0, std::abs(a_lo)) || am > a_hi + 1e-12 * std::max(1.0, std::abs(a_hi)))
      throw std::logic_error("anisotropy is not monotone in q on the quadrature grid");
    if (am < a) {
      lo = mid;
      a_lo = am;
    } else {
      hi = mid;
      a_hi = am;
    }
  }
  const double q = 0.5 * (lo + hi);
  return norm_of(evaluate_q(t, q), m, q);
}

lmi::MaxdetProblem brl_problem(const ClosedLoopRealization& sys, double gamma) {
  const int n = sys.order(), m = sys.inputs();
  lmi::MaxdetProblem p;
  const lmi::AffineMatrix P = p.symmetric("P", n);
  lmi::SymmetricBlocks b({n, m});
  b.set(0, 0, sys.A.transpose() * P * sys.A - P + lmi::AffineMatrix(MatrixXd(sys.C.transpose() * sys.C)));
  b.set(1, 0, sys.B.transpose() * P * sys.A + lmi::AffineMatrix(MatrixXd(sys.D.transpose() * sys.C)));
  b.set(1, 1, sys.B.transpose() * P * sys.B +
                  lmi::AffineMatrix(MatrixXd(sys.D.transpose() * sys.D - gamma * gamma * MatrixXd::Identity(m, m))));
  p.constrain("brl", b.build(), lmi::Sense::negative_definite);
  p.constrain("P", P, lmi::Sense::positive_definite);
  return p;
}

}  // namespace

Eigen::MatrixXcd frequency_response(const ClosedLoopRealization& sys, double omega) {
  sys.check_dimensions();
  return ResponseEvaluator(sys)(omega);
}

MatrixXd dlyap(const MatrixXd& A, const MatrixXd& Q) {
  if (spectral_radius(A) >= 1.0) throw UnstableSystem("Stein equation needs a Schur-stable matrix");
  MatrixXd X = Q, Ak = A;
  for (int it = 0; it < 64; ++it) {
    const MatrixXd inc = Ak * X * Ak.transpose();
    X += inc;
    Ak = Ak * Ak;
    if (inc.norm() <= 1e-17 * X.norm() && Ak.norm() < 1e-8) break;
  }
  return 0.5 * (X + X.transpose());
}

ClosedLoopRealization balanced_realization(const ClosedLoopRealization& sys, double rel_tol,
                                           VectorXd* hankel_singular_values) {
  sys.check_dimensions();
  if (sys.order() == 0) return sys;
  // Square-root factors L with P = L L' from a clipped eigendecomposition, so
  // rank-deficient Gramians are handled.
  auto factor = [](const MatrixXd& P) {
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (P + P.transpose()));
    return MatrixXd(es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  };
  const MatrixXd Lc = factor(dlyap(sys.A, sys.B * sys.B.transpose()));
  const MatrixXd Lo = factor(dlyap(sys.A.transpose(), sys.C.transpose() * sys.C));
  const Eigen::JacobiSVD<MatrixXd> svd(Lo.transpose() * Lc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  if (hankel_singular_values) *hankel_singular_values = sv;
  int k = 0;
  while (k < sv.size() && sv(k) > rel_tol * sv(0)) ++k;
  if (k == 0 || !(sv(0) > 0.0)) return balance(sys);
  const VectorXd isq = sv.head(k).cwiseSqrt().cwiseInverse();
  const MatrixXd T = isq.asDiagonal() * svd.matrixU().leftCols(k).transpose() * Lo.transpose();
  const MatrixXd Ti = Lc * svd.matrixV().leftCols(k) * isq.asDiagonal();
  return {T * sys.A * Ti, T * sys.B, sys.C * Ti, sys.D};
}

NormCertificate h2_norm(const ClosedLoopRealization& sys) {
  require_stable(sys);
  const MatrixXd W = dlyap(sys.A, sys.B * sys.B.transpose());
  const double v = (sys.C * W * sys.C.transpose() + sys.D * sys.D.transpose()).trace();
  return {std::sqrt(std::max(0.0, v)), "h2", "lyapunov", 1e-12, 0};
}

NormCertificate hinf_sweep(const ClosedLoopRealization& sys, int points) {
  require_stable(sys);
  const ResponseEvaluator F(sys);
  std::vector<double> s(points + 1);
  for (int k = 0; k <= points; ++k) s[k] = sigma_max(F(kPi * k / points));
  double best = *std::max_element(s.begin(), s.end());
  // Golden-section refinement around every local maximum of the sweep.
  const double h = kPi / points, g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int k = 0; k <= points; ++k) {
    const bool left = k == 0 || s[k] >= s[k - 1];
    const bool right = k == points || s[k] >= s[k + 1];
    if (!left || !right) continue;
    double lo = std::max(0.0, (k - 1) * h), hi = std::min(kPi, (k + 1) * h);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = sigma_max(F(x1)), f2 = sigma_max(F(x2));
    for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = sigma_max(F(x2));
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = sigma_max(F(x1));
      }
    }
    best = std::max({best, f1, f2});
  }
  return {best, "hinf", "sweep", 0.0, points + 1};
}

NormCertificate hinf_norm(const ClosedLoopRealization& sys, double rel_tol) {
  const NormCertificate sweep = hinf_sweep(sys);
  if (sweep.value == 0.0) return {0.0, "hinf", "sweep", 0.0, sweep.grid_points};
  solver::Options opts;
  auto feasible = [&](double g) {
    const solver::Solution s = solver::solve(lmi::strictness_margin(brl_problem(sys, g), 0.0), opts);
    return s.status == solver::Status::optimal;
  };
  double lo = sweep.value, hi = 1.1 * sweep.value;
  for (int k = 0; k < 60 && !feasible(hi); ++k) {
    lo = hi;
    hi *= 1.5;
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, "hinf", "brl-bisection", (hi - lo) / hi, sweep.grid_points};
}

double mean_anisotropy(const ShapingFilter& G, const QuadratureSpec& quad) {
  require_stable(G);
  const int m = G.outputs();
  const ResponseEvaluator F(G);
  auto on_grid = [&](long N) {
    const long half = N / 2;
    double tr = 0.0, logdet = 0.0;
    for (long k = 0; k <= half; ++k) {
      const double w = ((k == 0 || k == half) ? 1.0 : 2.0) / static_cast<double>(N);
      const Eigen::MatrixXcd Gk = F(2.0 * kPi * static_cast<double>(k) / static_cast<double>(N));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Gk * Gk.adjoint(), Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues()(0), lmax = es.eigenvalues()(m - 1);
      if (!(lmin > 1e-14 * lmax) || lmax <= 0.0)
        throw SingularSpectrum("shaping filter spectral density is singular on the frequency grid");
      tr += w * es.eigenvalues().sum();
      logdet += w * es.eigenvalues().array().log().sum();
    }
    return -0.5 * (m * std::log(m / tr) + logdet);
  };
  long N = quad.initial_points;
  double prev = on_grid(N);
  while (2 * N <= quad.max_points) {
    N *= 2;
    const double cur = on_grid(N);
    const bool done = std::abs(cur - prev) <= quad.rel_tol * std::max(1.0, std::abs(cur));
    prev = cur;
    if (done) break;
  }
  return std::max(0.0, prev);
}

NormCertificate anisotropic_norm_oracle(const ClosedLoopRealization& sys, double a, const QuadratureSpec& quad) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("mean anisotropy level must be finite and >= 0");
  require_stable(sys);
  const int m = sys.inputs();
  if (a == 0.0) {
    NormCertificate c = h2_norm(sys);
    c.value /= std::sqrt(static_cast<double>(m));
    c.kind = "anisotropic";
    return c;
  }
  const double peak = hinf_sweep(sys).value;
  if (peak == 0.0) return {0.0, "anisotropic", "frequency-domain", 0.0, 0};
  const ResponseEvaluator F(sys);
  long N = quad.initial_points;
  double prev = oracle_on_grid(spectrum_table(F, m, N), a, peak * peak);
  double change = std::numeric_limits<double>::infinity();
  while (2 * N <= quad.max_points) {
    N *= 2;
    const double cur = oracle_on_grid(spectrum_table(F, m, N), a, peak * peak);
    change = std::abs(cur - prev) / std::max(cur, 1e-300);
    prev = cur;
    if (change <= quad.rel_tol) break;
  }
  return {prev, "anisotropic", "frequency-domain", change, N};
}

}  // namespace aniso
