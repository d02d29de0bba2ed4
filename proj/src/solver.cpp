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
#include "aniso/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "json.hpp"

namespace aniso::solver {

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::feasible: return "feasible";
    case Status::infeasible: return "infeasible-certificate";
    case Status::max_iterations: return "max-iterations";
    case Status::numerical_failure: return "numerical-failure";
  }
  return "numerical-failure";
}

namespace {

using Blocks = std::vector<MatrixXd>;
constexpr double kInf = std::numeric_limits<double>::infinity();

double inner(const Blocks& A, const Blocks& B) {
  double s = 0.0;
  for (size_t b = 0; b < A.size(); ++b) s += A[b].cwiseProduct(B[b]).sum();
  return s;
}

double frob(const Blocks& A) { return std::sqrt(inner(A, A)); }

VectorXd apply_F(const SdpData& d, const Blocks& X) {
  VectorXd v = VectorXd::Zero(d.m);
  for (size_t b = 0; b < d.F.size(); ++b)
    for (const auto& [i, Fi] : d.F[b]) v(i) += Fi.cwiseProduct(X[b]).sum();
  return v;
}

Blocks apply_Fadj(const SdpData& d, const VectorXd& y, bool with_constant) {
  Blocks out(d.F.size());
  for (size_t b = 0; b < d.F.size(); ++b) {
    out[b] = with_constant ? d.F0[b] : MatrixXd::Zero(d.sizes[b], d.sizes[b]);
    for (const auto& [i, Fi] : d.F[b]) out[b] += y(i) * Fi;
  }
  return out;
}

bool positive_definite(const MatrixXd& S) {
  if (S.rows() == 1) return S(0, 0) > 0.0;
  Eigen::LLT<MatrixXd> llt(S);
  return llt.info() == Eigen::Success;
}

double min_eig(const MatrixXd& S) {
  if (S.rows() == 1) return S(0, 0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Largest alpha with X + alpha dX >= 0.
double max_step(const MatrixXd& X, const MatrixXd& dX) {
  if (X.rows() == 1) return dX(0, 0) < 0.0 ? -X(0, 0) / dX(0, 0) : kInf;
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd L = llt.matrixL();
  MatrixXd M = L.triangularView<Eigen::Lower>().solve(dX);
  M = L.triangularView<Eigen::Lower>().solve(M.transpose()).transpose();
  const double lmin = min_eig(0.5 * (M + M.transpose()));
  return lmin < 0.0 ? -1.0 / lmin : kInf;
}

// Nesterov-Todd scaling point: W = G G', G^-1 X G^-T = G' Z G = diag(lambda).
struct NtScaling {
  MatrixXd G, Ginv, W;
  VectorXd lambda;
};

bool nt_scaling(const MatrixXd& X, const MatrixXd& Z, NtScaling& s) {
  Eigen::LLT<MatrixXd> lx(X), lz(Z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const MatrixXd Lx = lx.matrixL(), Lz = lz.matrixL();
  Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
  s.lambda = svd.singularValues();
  if (s.lambda.minCoeff() <= 0.0 || !s.lambda.allFinite()) return false;
  const VectorXd rs = s.lambda.cwiseSqrt();
  s.G = Lx * svd.matrixV() * rs.cwiseInverse().asDiagonal();
  const MatrixXd Lxinv = Lx.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(X.rows(), X.cols()));
  s.Ginv = rs.asDiagonal() * svd.matrixV().transpose() * Lxinv;
  s.W = s.G * s.G.transpose();
  return true;
}

struct Scaled {
  SdpData data;
  VectorXd col;                // x = col .* x_scaled
  std::vector<double> row;     // block multipliers
  double obj = 1.0;            // c_scaled = col .* c / obj
};

Scaled scale_data(const SdpData& in) {
  Scaled s;
  s.data = in;
  SdpData& d = s.data;
  s.row.assign(d.F.size(), 1.0);
  for (size_t b = 0; b < d.F.size(); ++b) {
    double mx = d.F0[b].cwiseAbs().maxCoeff();
    for (const auto& t : d.F[b]) mx = std::max(mx, t.second.cwiseAbs().maxCoeff());
    if (mx > 0.0) s.row[b] = 1.0 / mx;
    d.F0[b] *= s.row[b];
    for (auto& t : d.F[b]) t.second *= s.row[b];
  }
  s.col = VectorXd::Zero(d.m);
  for (size_t b = 0; b < d.F.size(); ++b)
    for (const auto& [i, Fi] : d.F[b]) s.col(i) = std::max(s.col(i), Fi.cwiseAbs().maxCoeff());
  for (int i = 0; i < d.m; ++i) {
    if (s.col(i) <= 0.0) throw std::invalid_argument("coordinate " + std::to_string(i) + " appears in no constraint");
    s.col(i) = 1.0 / s.col(i);
  }
  for (size_t b = 0; b < d.F.size(); ++b)
    for (auto& [i, Fi] : d.F[b]) Fi *= s.col(i);
  d.c = d.c.cwiseProduct(s.col);
  const double cn = d.c.size() ? d.c.cwiseAbs().maxCoeff() : 0.0;
  if (cn > 0.0) {
    s.obj = cn;
    d.c /= cn;
  }
  return s;
}

}  // namespace

SdpData compile(const lmi::MaxdetProblem& problem) {
  const lmi::MaxdetProblem enc = lmi::encode_detroots(problem);
  SdpData d;
  d.m = enc.num_coords();
  d.c = enc.objective();
  if (d.c.size() != d.m) d.c = VectorXd::Zero(d.m);
  for (const auto& b : enc.blocks()) {
    const double sign = b.sense == lmi::Sense::negative_definite ? -1.0 : 1.0;
    const int n = b.expr.rows();
    d.sizes.push_back(n);
    d.names.push_back(b.name);
    d.F0.push_back(sign * b.expr.constant() - b.margin * MatrixXd::Identity(n, n));
    std::vector<std::pair<int, MatrixXd>> terms;
    for (const auto& [i, M] : b.expr.terms()) terms.emplace_back(i, sign * M);
    d.F.push_back(std::move(terms));
  }
  return d;
}

IpmResult interior_point(const SdpData& d, const Options& o, const std::optional<VectorXd>& y0) {
  const size_t nb = d.F.size();
  int ntot = 0;
  for (int s : d.sizes) ntot += s;
  IpmResult r;

  Blocks X(nb), Z(nb);
  VectorXd y = y0 ? *y0 : VectorXd::Zero(d.m);
  double normF0 = 0.0;
  for (const auto& F0 : d.F0) normF0 += F0.squaredNorm();
  normF0 = 1.0 + std::sqrt(normF0);
  const double normc = 1.0 + d.c.norm();
  {
    const Blocks Gy = apply_Fadj(d, y, true);
    for (size_t b = 0; b < nb; ++b) {
      const int n = d.sizes[b];
      double xi = std::max(10.0, std::sqrt(double(n))), zeta = std::max(10.0, std::sqrt(double(n)));
      zeta = std::max(zeta, d.F0[b].norm());
      for (const auto& [i, Fi] : d.F[b]) {
        const double nf = Fi.norm();
        xi = std::max(xi, n * (1.0 + std::abs(d.c(i))) / (1.0 + nf));
        zeta = std::max(zeta, nf);
      }
      X[b] = xi * MatrixXd::Identity(n, n);
      Z[b] = y0 ? Gy[b] : zeta * MatrixXd::Identity(n, n);
    }
  }

  std::vector<NtScaling> nt(nb);
  std::vector<std::vector<MatrixXd>> T(nb);
  int stall = 0;
  double best_obj = kInf;
  for (int it = 0;; ++it) {
    const Blocks Gy = apply_Fadj(d, y, true);
    if (d.c.dot(y) < best_obj &&
        std::all_of(Gy.begin(), Gy.end(), [](const MatrixXd& g) { return positive_definite(g); })) {
      best_obj = d.c.dot(y);
      r.best_y = y;
    }
    Blocks Rd(nb);
    for (size_t b = 0; b < nb; ++b) Rd[b] = Gy[b] - Z[b];
    const VectorXd rp = d.c - apply_F(d, X);
    r.pobj = d.c.dot(y);
    r.dobj = -inner(d.F0, X);
    const double gap = inner(X, Z);
    const double mu = gap / ntot;
    r.pinf = frob(Rd) / normF0;
    r.dinf = rp.norm() / normc;
    r.relgap = std::max(gap, std::abs(r.pobj - r.dobj)) / (1.0 + std::abs(r.pobj) + std::abs(r.dobj));
    r.iterations = it;
    if (o.verbose)
      std::fprintf(stderr, "%3d  p=% .9e d=% .9e gap=%.2e pinf=%.2e dinf=%.2e\n", it, r.pobj, r.dobj, r.relgap,
                   r.pinf, r.dinf);
    if (r.pinf < o.feas_tol && r.dinf < o.feas_tol && r.relgap < o.gap_tol) {
      r.converged = true;
      r.message = "converged";
      break;
    }
    // Farkas: X >= 0, F(X) = 0, <F0, X> < 0.
    if (r.dobj > 0.0) {
      const VectorXd FX = apply_F(d, X);
      if (FX.norm() <= o.infeas_tol * r.dobj && r.dinf > 0.0) {
        r.infeasible = true;
        r.message = "infeasibility certificate";
        break;
      }
    }
    if (it >= o.max_iterations) {
      r.message = "iteration limit";
      break;
    }
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e13) {
      r.message = "iterates diverging";
      break;
    }

    size_t bad = nb;
    for (size_t b = 0; b < nb && bad == nb; ++b)
      if (!nt_scaling(X[b], Z[b], nt[b])) bad = b;
    if (bad < nb) {
      r.message = "lost positive definiteness";
      if (o.verbose && bad < d.names.size()) std::fprintf(stderr, "  in block %s\n", d.names[bad].c_str());
      break;
    }

    MatrixXd M = MatrixXd::Zero(d.m, d.m);
    for (size_t b = 0; b < nb; ++b) {
      const auto& Fb = d.F[b];
      T[b].resize(Fb.size());
      for (size_t k = 0; k < Fb.size(); ++k) T[b][k] = nt[b].G.transpose() * Fb[k].second * nt[b].G;
      for (size_t k = 0; k < Fb.size(); ++k)
        for (size_t l = 0; l <= k; ++l) {
          const double v = T[b][k].cwiseProduct(T[b][l]).sum();
          M(Fb[k].first, Fb[l].first) += v;
          if (k != l) M(Fb[l].first, Fb[k].first) += v;
        }
    }
    M = 0.5 * (M + M.transpose());
    Eigen::LLT<MatrixXd> llt(M);
    Eigen::LDLT<MatrixXd> ldlt;
    bool use_llt = llt.info() == Eigen::Success;
    if (!use_llt) {
      const double reg = 1e-14 * std::max(1.0, M.diagonal().maxCoeff());
      llt.compute(M + reg * MatrixXd::Identity(d.m, d.m));
      use_llt = llt.info() == Eigen::Success;
      if (!use_llt) ldlt.compute(M);
    }
    auto schur_solve = [&](const VectorXd& rhs) -> VectorXd {
      auto once = [&](const VectorXd& v) -> VectorXd {
        if (use_llt) return llt.solve(v);
        return ldlt.solve(v);
      };
      VectorXd x = once(rhs);
      for (int k = 0; k < 2; ++k) x += once(rhs - M * x);  // iterative refinement
      return x;
    };

    auto direction = [&](const Blocks& H, VectorXd& dy, Blocks& dX, Blocks& dZ) {
      Blocks Tm(nb);
      for (size_t b = 0; b < nb; ++b) Tm[b] = H[b] - nt[b].W * Rd[b] * nt[b].W;
      dy = schur_solve(apply_F(d, Tm) - rp);
      dZ = apply_Fadj(d, dy, false);
      dX.resize(nb);
      for (size_t b = 0; b < nb; ++b) {
        dZ[b] += Rd[b];
        dX[b] = H[b] - nt[b].W * dZ[b] * nt[b].W;
        dX[b] = 0.5 * (dX[b] + dX[b].transpose());
      }
    };
    auto steps = [&](const Blocks& dX, const Blocks& dZ, double& ap, double& ad) {
      ap = kInf;
      ad = kInf;
      for (size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(X[b], dX[b]));
        ad = std::min(ad, max_step(Z[b], dZ[b]));
      }
    };

    // Predictor (affine scaling): dX + W dZ W = -X.
    Blocks H(nb), dXa, dZa;
    for (size_t b = 0; b < nb; ++b) H[b] = -X[b];
    VectorXd dya;
    direction(H, dya, dXa, dZa);
    double ap, ad;
    steps(dXa, dZa, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double gap_aff = 0.0;
    for (size_t b = 0; b < nb; ++b) gap_aff += (X[b] + ap * dXa[b]).cwiseProduct(Z[b] + ad * dZa[b]).sum();
    const double sigma = std::clamp(std::pow(std::max(gap_aff, 0.0) / std::max(gap, 1e-300), 3.0), 0.0, 1.0);

    // Mehrotra corrector in the scaled space.
    for (size_t b = 0; b < nb; ++b) {
      const VectorXd& lam = nt[b].lambda;
      const MatrixXd dXs = nt[b].Ginv * dXa[b] * nt[b].Ginv.transpose();
      const MatrixXd dZs = nt[b].G.transpose() * dZa[b] * nt[b].G;
      MatrixXd R = -0.5 * (dXs * dZs + dZs * dXs);
      for (int i = 0; i < lam.size(); ++i) R(i, i) += sigma * mu - lam(i) * lam(i);
      MatrixXd D(R.rows(), R.cols());
      for (int i = 0; i < R.rows(); ++i)
        for (int j = 0; j < R.cols(); ++j) D(i, j) = 2.0 * R(i, j) / (lam(i) + lam(j));
      H[b] = nt[b].G * D * nt[b].G.transpose();
    }
    VectorXd dy;
    Blocks dX, dZ;
    direction(H, dy, dX, dZ);
    steps(dX, dZ, ap, ad);
    ap = std::min(1.0, o.step_fraction * ap);
    ad = std::min(1.0, o.step_fraction * ad);
    // Backtrack when rounding leaves the new iterate outside the cone.
    auto keeps_pd = [&](const Blocks& V, const Blocks& dV, double alpha) {
      for (size_t b = 0; b < nb; ++b)
        if (!positive_definite(V[b] + alpha * dV[b])) return false;
      return true;
    };
    for (int k = 0; k < 40 && !keeps_pd(X, dX, ap); ++k) ap *= 0.7;
    for (int k = 0; k < 40 && !keeps_pd(Z, dZ, ad); ++k) ad *= 0.7;
    for (size_t b = 0; b < nb; ++b) {
      X[b] += ap * dX[b];
      Z[b] += ad * dZ[b];
      X[b] = 0.5 * (X[b] + X[b].transpose());
      Z[b] = 0.5 * (Z[b] + Z[b].transpose());
    }
    y += ad * dy;
    stall = (ap < o.min_step && ad < o.min_step) ? stall + 1 : 0;
    if (stall >= o.stall_iterations) {
      r.stalled = true;
      r.message = "step length stalled";
      r.iterations = it + 1;
      break;
    }
  }
  r.y = y;
  r.X = std::move(X);
  r.Z = std::move(Z);
  return r;
}

namespace {

double lmi_min_eig(const SdpData& d, const VectorXd& y) {
  const Blocks G = apply_Fadj(d, y, true);
  double m = kInf;
  for (const auto& g : G) m = std::min(m, min_eig(0.5 * (g + g.transpose())));
  return m;
}

// min t  s.t.  G(y) + t I >= 0,  1 + t >= 0, started dual-feasible.
IpmResult phase_one(const SdpData& d, const Options& o) {
  SdpData p;
  p.m = d.m + 1;
  p.sizes = d.sizes;
  p.F0 = d.F0;
  p.F = d.F;
  p.names = d.names;
  for (size_t b = 0; b < p.F.size(); ++b) p.F[b].emplace_back(d.m, MatrixXd::Identity(d.sizes[b], d.sizes[b]));
  p.sizes.push_back(1);
  p.F0.push_back(MatrixXd::Ones(1, 1));
  p.F.push_back({{d.m, MatrixXd::Ones(1, 1)}});
  p.names.push_back("phase1.bound");
  p.c = VectorXd::Zero(p.m);
  p.c(d.m) = 1.0;
  VectorXd y0 = VectorXd::Zero(p.m);
  y0(d.m) = std::max(0.0, -lmi_min_eig(d, VectorXd::Zero(d.m))) + 1.0;
  return interior_point(p, o, y0);
}

}  // namespace

Solution ReferenceBackend::solve(const lmi::MaxdetProblem& problem, const Options& opts) const {
  const auto t0 = std::chrono::steady_clock::now();
  Solution sol;
  sol.backend = name();
  auto finish = [&](Solution& s) {
    // The dual of an unconverged run is only approximately feasible, so
    // -<F0, X> need not bound the optimum; never report it above the point.
    if (s.status == Status::feasible) s.dual_bound = std::min(s.dual_bound, s.objective);
    s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
  };

  const SdpData raw = compile(problem);
  const int m = raw.m;
  if (m == 0) {
    // Nothing to optimize: the constant blocks decide.
    sol.x = VectorXd::Zero(0);
    sol.objective = problem.objective_offset();
    sol.dual_bound = sol.objective;
    for (size_t b = 0; b < raw.F0.size(); ++b) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(raw.F0[b]);
      if (es.eigenvalues()(0) < 0.0) {
        sol.status = Status::infeasible;
        sol.dual.assign(raw.F0.size(), MatrixXd());
        for (size_t k = 0; k < raw.F0.size(); ++k) sol.dual[k] = MatrixXd::Zero(raw.sizes[k], raw.sizes[k]);
        const VectorXd v = es.eigenvectors().col(0);
        sol.dual[b] = v * v.transpose();
        sol.message = "constant block '" + raw.names[b] + "' is not positive semidefinite";
        return finish(sol);
      }
    }
    sol.status = Status::optimal;
    sol.message = "no decision variables; constraints hold";
    return finish(sol);
  }

  const Scaled sc = scale_data(raw);
  auto unscale_x = [&](const VectorXd& ys) {
    return VectorXd(sc.col.head(problem.num_coords()).cwiseProduct(ys.head(problem.num_coords())));
  };
  auto unscale_dual = [&](const Blocks& Xs, double factor) {
    Blocks out(raw.F0.size());
    for (size_t b = 0; b < out.size(); ++b) out[b] = factor * sc.row[b] * Xs[b];
    return out;
  };
  auto fill_point = [&](const IpmResult& r) {
    sol.x = unscale_x(r.y);
    sol.objective = problem.has_objective() ? problem.objective().dot(sol.x) + problem.objective_offset()
                                            : problem.objective_offset();
    sol.primal_residual = r.pinf;
    sol.dual_residual = r.dinf;
    sol.gap = r.relgap;
    sol.iterations += r.iterations;
  };
  auto certificate = [&](const IpmResult& r, size_t nblocks) {
    Blocks Xs(r.X.begin(), r.X.begin() + static_cast<long>(nblocks));
    Blocks Xo = unscale_dual(Xs, 1.0);
    double s = 0.0;
    for (size_t b = 0; b < Xo.size(); ++b) s += raw.F0[b].cwiseProduct(Xo[b]).sum();
    if (s < 0.0)
      for (auto& x : Xo) x /= -s;
    return Xo;
  };
  auto run_phase_one = [&]() {
    const IpmResult p1 = phase_one(sc.data, opts);
    sol.iterations += p1.iterations;
    const double t = p1.y(m);
    const VectorXd ys = p1.y.head(m);
    if (t < 0.0 && lmi_min_eig(sc.data, ys) > 0.0) return std::optional<VectorXd>(ys);
    if (p1.converged || p1.infeasible || t > 0.0) {
      sol.status = Status::infeasible;
      sol.dual = certificate(p1, raw.F0.size());
      sol.message = "phase one optimum t* = " + std::to_string(t) + " >= 0";
      sol.x = unscale_x(ys);
      sol.primal_residual = p1.pinf;
      sol.dual_residual = p1.dinf;
      sol.gap = p1.relgap;
    } else {
      sol.status = Status::numerical_failure;
      sol.message = "phase one did not converge: " + p1.message;
    }
    return std::optional<VectorXd>();
  };

  // Stalls near the boundary usually come from badly centred dual iterates;
  // restarting from the best strictly feasible point with fresh duals tends
  // to finish the job. Updates sol's point and dual bound when it helps.
  auto polish = [&](const IpmResult& first_run) {
    IpmResult cur = first_run;
    bool restarted = false;
    for (int restart = 0; restart < 3; ++restart) {
      const VectorXd start = cur.best_y ? *cur.best_y : cur.y;
      if (!(lmi_min_eig(sc.data, start) > 0.0)) break;
      const IpmResult next = interior_point(sc.data, opts, start);
      sol.iterations += next.iterations;
      const bool usable = next.converged || (next.y.allFinite() && lmi_min_eig(sc.data, next.y) >= -opts.feas_tol);
      if (!usable || !(next.converged || next.relgap < cur.relgap)) break;
      cur = next;
      restarted = true;
      if (cur.converged) break;
    }
    if (restarted) {
      const int its = sol.iterations;
      fill_point(cur);
      sol.iterations = its;
      sol.dual = unscale_dual(cur.X, sc.obj);
      double s = problem.objective_offset();
      for (size_t b = 0; b < raw.F0.size(); ++b) s -= raw.F0[b].cwiseProduct(sol.dual[b]).sum();
      sol.dual_bound = s;
    }
    return cur;
  };

  const bool feasibility_only = !problem.has_objective() || sc.data.c.isZero(0.0);
  if (feasibility_only) {
    if (auto ys = run_phase_one()) {
      IpmResult r;
      r.y = *ys;
      fill_point(r);
      sol.status = Status::optimal;
      sol.dual_bound = sol.objective;
      sol.message = "strictly feasible point found";
    }
    return finish(sol);
  }

  const IpmResult r = interior_point(sc.data, opts);
  fill_point(r);
  sol.dual = unscale_dual(r.X, sc.obj);
  {
    double s = problem.objective_offset();
    for (size_t b = 0; b < raw.F0.size(); ++b) s -= raw.F0[b].cwiseProduct(sol.dual[b]).sum();
    sol.dual_bound = s;
  }
  if (r.converged) {
    sol.status = Status::optimal;
    sol.message = r.message;
    return finish(sol);
  }
  if (r.infeasible) {
    sol.status = Status::infeasible;
    sol.dual = certificate(r, raw.F0.size());
    sol.message = r.message;
    return finish(sol);
  }
  // Not converged: keep the iterate if it satisfies the LMIs, otherwise
  // classify with a phase-one solve.
  if (r.y.allFinite() && lmi_min_eig(sc.data, r.y) >= -opts.feas_tol) {
    const IpmResult cur = polish(r);
    if (cur.converged) {
      sol.status = Status::optimal;
      sol.message = "converged after a warm restart";
      return finish(sol);
    }
    sol.status = Status::feasible;
    sol.message = cur.message + " (feasible iterate, relative gap " + std::to_string(cur.relgap) + ")";
    return finish(sol);
  }
  // Retry from a strictly feasible phase-one point: the iterates then stay
  // inside the LMI region and any of them is a usable answer.
  const Solution first = sol;
  const auto y0 = run_phase_one();
  if (!y0) {
    if (r.best_y) {
      const int its = sol.iterations;
      sol = first;
      IpmResult best = r;
      best.y = *r.best_y;
      fill_point(best);
      sol.iterations = its;
      sol.status = Status::feasible;
      sol.message = r.message + " (best strictly feasible iterate kept)";
    }
    return finish(sol);
  }
  const int p1_iterations = sol.iterations;
  const IpmResult r2 = interior_point(sc.data, opts, *y0);
  sol = first;
  sol.iterations = p1_iterations;
  fill_point(r2);
  sol.dual = unscale_dual(r2.X, sc.obj);
  {
    double s = problem.objective_offset();
    for (size_t b = 0; b < raw.F0.size(); ++b) s -= raw.F0[b].cwiseProduct(sol.dual[b]).sum();
    sol.dual_bound = s;
  }
  if (r2.converged) {
    sol.status = Status::optimal;
    sol.message = "converged from a phase-one start";
    return finish(sol);
  }
  if (r2.y.allFinite() && lmi_min_eig(sc.data, r2.y) >= -opts.feas_tol) {
    const IpmResult cur = polish(r2);
    sol.status = cur.converged ? Status::optimal : Status::feasible;
    sol.message = cur.converged ? std::string("converged after a warm restart")
                                : cur.message + " (feasible iterate, relative gap " + std::to_string(cur.relgap) + ")";
    return finish(sol);
  }
  IpmResult best = r2;
  best.y = r2.best_y ? *r2.best_y : *y0;
  const int its = sol.iterations;
  fill_point(best);
  sol.iterations = its;
  sol.status = r2.best_y ? Status::feasible
               : (r2.stalled || r2.message == "lost positive definiteness") ? Status::numerical_failure
                                                                               : Status::max_iterations;
  sol.message = r2.message + (r2.best_y ? " (best strictly feasible iterate kept)" : "; problem is strictly feasible");
  return finish(sol);
}

std::unique_ptr<Backend> make_backend(const std::string& name) {
  if (name.empty() || name == "reference") return std::make_unique<ReferenceBackend>();
  throw std::invalid_argument("unknown solver backend '" + name + "'");
}

std::unique_ptr<Backend> default_backend() {
  const char* env = std::getenv("ANISO_SOLVER");
  return make_backend(env ? env : "");
}

Solution solve(const lmi::MaxdetProblem& problem, const Options& opts) {
  return default_backend()->solve(problem, opts);
}

lmi::ResidualReport verify(const lmi::MaxdetProblem& problem, const Solution& sol, double tol) {
  return lmi::check_point(problem, sol.x, tol);
}

std::string dump_solution(const Solution& s) {
  nlohmann::ordered_json j;
  j["status"] = to_string(s.status);
  j["backend"] = s.backend;
  j["objective"] = s.objective;
  j["dual_bound"] = s.dual_bound;
  j["primal_residual"] = s.primal_residual;
  j["dual_residual"] = s.dual_residual;
  j["gap"] = s.gap;
  j["iterations"] = s.iterations;
  j["message"] = s.message;
  j["x"] = std::vector<double>(s.x.data(), s.x.data() + s.x.size());
  return j.dump(2);
}

}  // namespace aniso::solver
