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
// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "aniso/analysis.hpp"
#include "aniso/lmi.hpp"
#include "aniso/sim.hpp"
#include "aniso/solver.hpp"
#include "aniso/spectral.hpp"
#include "aniso/synthesis.hpp"
#include "support.hpp"

using namespace aniso;
using aniso::testing::PlantShape;
using aniso::testing::Random;
using aniso::testing::rel_diff;

namespace {

// Pinned tolerances.
constexpr double kLimitH2Tol = 0.01;       // criterion 1, a = 0
constexpr double kLimitHinfTol = 0.02;     // criterion 1, a = 30
constexpr double kRuntimeLimit = 60.0;     // criterion 1, seconds
constexpr double kMonotoneTol = 1e-6;      // criterion 2, relative
constexpr double kSandwichTol = 1e-3;      // criterion 2, relative
constexpr double kOracleTol = 0.01;        // criterion 3
constexpr double kSoundnessTol = 1e-3;     // criterion 4
constexpr double kResidualFactor = 10.0;   // criterion 4: residual < 10 eps
constexpr double kOrderingTol = 1e-6;      // criterion 5, relative
constexpr double kGoldenTol = 1e-6;        // criterion 6, absolute
constexpr double kDualityTol = 1e-6;       // criterion 7, relative
constexpr double kSigmaFactor = 3.0;       // criterion 8

const std::vector<double> kLevels{0.0, 0.1, 0.5, 1.0, 5.0, 30.0};
const std::vector<double> kSweep{0.0, 0.7, 30.0};

struct Outcome {
  bool pass = true;
  std::string detail;
};

void report(int id, const char* title, const Outcome& o) {
  std::printf("criterion %d %s: %s -- %s\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1, 2, 3
void analysis_criteria(bool& ok1, bool& ok2, bool& ok3) {
  Random rng(2026);
  Outcome c1, c2, c3;
  double worst_h2 = 0.0, worst_hinf = 0.0, worst_oracle = 0.0, worst_mono = 0.0, worst_sandwich = 0.0;
  double limit_time = 0.0;
  int failures_mono = 0, failures_sandwich = 0;
  for (int s = 0; s < 20; ++s) {
    const int n = 1 + s % 6, m = 1 + s % 3, p = 1 + (s / 3) % m;
    const ClosedLoopRealization sys = aniso::testing::random_stable_system(rng, n, m, p, 0.9);
    const double h2 = h2_norm(sys).value / std::sqrt(double(m));
    const double hinf = hinf_norm(sys).value;
    std::vector<double> g;
    for (double a : kLevels) {
      const auto t0 = std::chrono::steady_clock::now();
      const AnalysisReport r = analyze(sys, a);
      const double dt = seconds_since(t0);
      if (a == 0.0 || a == 30.0) limit_time += dt;
      if (!r.feasible) {
        c1.pass = c2.pass = c3.pass = false;
        g.push_back(NAN);
        continue;
      }
      g.push_back(r.gamma);
      worst_oracle = std::max(worst_oracle, rel_diff(r.gamma, r.oracle.value));
      if (a == 0.0) worst_h2 = std::max(worst_h2, rel_diff(r.gamma, h2));
      if (a == 30.0) worst_hinf = std::max(worst_hinf, rel_diff(r.gamma, hinf));
      const double below = (h2 - r.gamma) / h2, above = (r.gamma - hinf) / hinf;
      worst_sandwich = std::max({worst_sandwich, below, above});
      if (below > kSandwichTol || above > kSandwichTol) ++failures_sandwich;
    }
    for (size_t k = 1; k < g.size(); ++k) {
      const double drop = (g[k - 1] - g[k]) / g[k - 1];
      worst_mono = std::max(worst_mono, drop);
      if (!(drop <= kMonotoneTol)) ++failures_mono;
    }
  }
  c1.pass = c1.pass && worst_h2 <= kLimitH2Tol && worst_hinf <= kLimitHinfTol && limit_time < kRuntimeLimit;
  c1.detail = fmt("max rel. dev. a=0 vs H2/sqrt(mw) %.2e (tol 1e-2), a=30 vs Hinf %.2e (tol 2e-2), %.1f s", worst_h2,
                  worst_hinf, limit_time);
  c2.pass = c2.pass && failures_mono == 0 && failures_sandwich == 0;
  c2.detail = fmt("largest relative decrease %.2e (tol 1e-6), largest sandwich excess %.2e (tol 1e-3)", worst_mono,
                  worst_sandwich);
  c3.pass = c3.pass && worst_oracle <= kOracleTol;
  c3.detail = fmt("max relative difference between the convex program and the oracle %.2e over 120 runs (tol 1e-2)",
                  worst_oracle);
  report(1, "limiting cases a=0 / a=30 on 20 random systems", c1);
  report(2, "monotonicity in a and H2/Hinf sandwich", c2);
  report(3, "convex program vs frequency-domain oracle", c3);
  ok1 = c1.pass;
  ok2 = c2.pass;
  ok3 = c3.pass;
}

// ---------------------------------------------------------------- 4, 5
struct DesignCase {
  std::string label;
  PlantRealization plant;
  DesignMode mode;
  int order = 0;
};

PlantRealization structural_plant(Random& r, int n1, int n2, int mw, int mu, int pz, int py) {
  const int n = n1 + n2;
  PlantRealization p;
  p.A = MatrixXd::Zero(n, n);
  p.A.topLeftCorner(n1, n1) = r.with_radius(n1, 0.9);
  p.A.topRightCorner(n1, n2) = r.gaussian(n1, n2);
  p.A.bottomRightCorner(n2, n2) = r.with_radius(n2, 0.7);
  p.Bu = MatrixXd::Zero(n, mu);
  p.Bu.topRows(n1) = r.gaussian(n1, mu);
  p.Cy = MatrixXd::Zero(py, n);
  p.Cy.rightCols(n2) = r.gaussian(py, n2);
  p.Bw = r.gaussian(n, mw);
  p.Cz = r.gaussian(pz, n);
  p.Dzw = 0.3 * r.gaussian(pz, mw);
  p.Dzu = r.gaussian(pz, mu);
  p.Dyw = r.gaussian(py, mw);
  // Hide the pattern behind an orthogonal change of coordinates.
  const Eigen::HouseholderQR<MatrixXd> qr(r.gaussian(n, n));
  const MatrixXd Q = qr.householderQ();
  return apply_transform(p, Q, Q.transpose());
}

// Candidate plants per design mode. Candidates closer than kMinMargin to
// losing stabilizability or detectability are redrawn. The static and
// fixed-order classes rest on sufficient conditions, so there a candidate
// whose design LMIs are certified infeasible is skipped (the class does not
// cover it); numerical failures are never skipped.
using Generator = std::function<DesignCase(Random&, int)>;

struct ModeSpec {
  std::string name;
  std::uint64_t seed;
  Generator make;
  bool sufficient_only = false;  // infeasible candidates may be skipped
};

std::vector<ModeSpec> mode_specs() {
  std::vector<ModeSpec> specs;
  specs.push_back({"state-feedback", 4242, [](Random& rng, int k) {
                     const int n = 2 + k % 4, mw = 1 + k % 3;
                     PlantShape s{n, mw, 1 + k % 2, 1 + (k / 2) % mw, n};
                     PlantRealization p = aniso::testing::random_plant(rng, s, 1.2);
                     p.Cy = MatrixXd::Identity(n, n);
                     p.Dyw = MatrixXd::Zero(n, mw);
                     return DesignCase{"state-feedback #" + std::to_string(k), p, DesignMode::state_feedback};
                   }});
  // One control input and one measurement: exact disturbance decoupling,
  // whose infimum gamma -> 0 is not attained, is then generically excluded.
  specs.push_back({"full-order", 4343, [](Random& rng, int k) {
                     const int n = 2 + k % 4, mw = 1 + k % 3;
                     PlantShape s{n, mw, 1, 1 + (k / 2) % mw, 1};
                     return DesignCase{"full-order #" + std::to_string(k), aniso::testing::random_plant(rng, s, 1.1),
                                       DesignMode::full_order};
                   }});
  // Cycles through the structural, singular-control and singular-filtering
  // classes; the mode resolves the class from the plant.
  specs.push_back({"sof", 4444, [](Random& rng, int k) {
                     const int n = 2 + k % 3, mw = 1 + k % 3;
                     const int cls = k % 3;
                     PlantRealization p;
                     if (cls == 2) {
                       p = structural_plant(rng, 1 + k % 2, 1 + (k / 3) % 2, mw, 1, 1 + (k / 2) % mw, 1);
                     } else {
                       PlantShape s{n, mw, 1 + (k / 3) % 2, 1 + (k / 2) % mw, 1 + (k / 4) % 2};
                       p = aniso::testing::random_plant(rng, s, 0.95);
                       if (cls == 0) p.Dzu.setZero();
                       if (cls == 1) p.Dyw.setZero();
                     }
                     return DesignCase{"sof #" + std::to_string(k), p, DesignMode::sof_auto};
                   },
                   true});
  specs.push_back({"fixed-order", 4545, [](Random& rng, int k) {
                     const int n = 2 + k % 4, mw = 1 + k % 3;
                     PlantShape s{n, mw, 1 + k % 2, 1 + (k / 2) % mw, 1 + (k / 3) % 2};
                     PlantRealization p = aniso::testing::random_plant(rng, s, 0.95);
                     p.Dyw.setZero();
                     return DesignCase{"fixed-order #" + std::to_string(k), p, DesignMode::fixed_order, 1};
                   },
                   true});
  return specs;
}

constexpr int kPlantsPerMode = 10;
constexpr double kMinMargin = 1e-2;
constexpr int kMaxCandidates = 40;

struct SweepResult {
  std::vector<SynthesisReport> reports;
  bool sound = true;
  std::string why;
};

struct DesignRuns {
  std::vector<std::pair<DesignCase, SweepResult>> runs;
  std::vector<std::pair<std::string, int>> skipped;  // per mode
};

SweepResult run_sweep(const DesignCase& c) {
  SweepResult s;
  SynthesisRequest req;
  req.plant = c.plant;
  req.mode = c.mode;
  req.order = c.order;
  std::vector<SynthesisReport> reps;
  try {
    reps = synthesize_sweep(req, kSweep);
  } catch (const std::exception& e) {
    reps.assign(kSweep.size(), SynthesisReport{});
    for (auto& r : reps) r.message = e.what();
  }
  for (size_t i = 0; i < kSweep.size(); ++i) {
    const double a = kSweep[i];
    const SynthesisReport& r = reps[i];
    const double tol = kResidualFactor * req.eps;
    std::string why;
    if (!r.ok())
      why = "status " + to_string(r.status) + " (" + r.message + ")";
    else if (!(r.spectral_radius < 1.0))
      why = fmt("rho %.6f", r.spectral_radius);
    else if (!(r.oracle.value < r.gamma * (1.0 + kSoundnessTol)))
      why = fmt("oracle %.6g vs gamma %.6g", r.oracle.value, r.gamma);
    else if (c.mode == DesignMode::full_order && !(r.reconstruction_residual && *r.reconstruction_residual < tol))
      why = fmt("reconstruction residual %.3e", r.reconstruction_residual ? *r.reconstruction_residual : NAN);
    if (!why.empty() && s.sound) {
      s.sound = false;
      s.why = c.label + fmt(" a=%.1f: ", a) + why;
    }
  }
  s.reports = std::move(reps);
  return s;
}

DesignRuns run_designs() {
  DesignRuns out;
  for (const ModeSpec& m : mode_specs()) {
    Random rng(m.seed);
    int kept = 0, skipped = 0;
    for (int k = 0; k < kMaxCandidates && kept < kPlantsPerMode; ++k) {
      const DesignCase c = m.make(rng, k);
      const ValidationReport v = validate_plant(c.plant);
      if (!(v.stabilizability_margin >= kMinMargin && v.detectability_margin >= kMinMargin)) {
        std::fprintf(stderr, "  %s redrawn: stabilizability/detectability margin below %.0e\n", c.label.c_str(),
                     kMinMargin);
        continue;
      }
      SweepResult s = run_sweep(c);
      const bool not_covered = std::any_of(s.reports.begin(), s.reports.end(), [](const SynthesisReport& r) {
        return r.status == SynthesisStatus::infeasible;
      });
      if (not_covered && m.sufficient_only) {
        std::fprintf(stderr, "  %s skipped: design LMIs certified infeasible\n", c.label.c_str());
        ++skipped;
        continue;
      }
      if (!s.sound) std::fprintf(stderr, "  %s\n", s.why.c_str());
      out.runs.emplace_back(c, std::move(s));
      ++kept;
    }
    out.skipped.emplace_back(m.name, skipped);
  }
  return out;
}

void synthesis_criteria(const DesignRuns& d, bool& ok4, bool& ok5) {
  const auto& runs = d.runs;
  Outcome c4, c5;
  int designs = 0, sound = 0, ordered = 0;
  double worst_ratio = 0.0, worst_resid = -INFINITY, worst_resid_other = -INFINITY;
  std::string first_bad4, first_bad5;
  for (const auto& [c, s] : runs) {
    designs += static_cast<int>(s.reports.size());
    for (const auto& r : s.reports) {
      if (r.ok()) worst_ratio = std::max(worst_ratio, r.oracle.value / r.gamma);
      if (!r.reconstruction_residual) continue;
      double& w = c.mode == DesignMode::full_order ? worst_resid : worst_resid_other;
      w = std::max(w, *r.reconstruction_residual);
    }
    if (s.sound) {
      sound += static_cast<int>(s.reports.size());
    } else if (first_bad4.empty()) {
      first_bad4 = s.why;
    }
    bool ord = s.sound;
    for (size_t k = 1; ord && k < s.reports.size(); ++k)
      ord = s.reports[k - 1].gamma <= s.reports[k].gamma * (1.0 + kOrderingTol);
    if (ord) {
      ++ordered;
    } else {
      if (s.sound)
        std::fprintf(stderr, "  %s gamma sweep %.9g %.9g %.9g\n", c.label.c_str(), s.reports[0].gamma,
                     s.reports[1].gamma, s.reports[2].gamma);
      if (first_bad5.empty()) first_bad5 = c.label + (s.sound ? " gamma not ordered" : " has a failed design");
    }
  }
  std::string per_mode;
  bool enough = true;
  for (const auto& [mode, skipped] : d.skipped) {
    const auto n = std::count_if(runs.begin(), runs.end(), [&](const auto& r) { return r.first.label.rfind(mode + " #", 0) == 0; });
    enough = enough && n >= kPlantsPerMode;
    per_mode += (per_mode.empty() ? "" : ", ") + mode + " " + std::to_string(n) + " plants (" + std::to_string(skipped) +
                " skipped as infeasible)";
  }
  c4.pass = sound == designs && enough;
  c4.detail = std::to_string(sound) + "/" + std::to_string(designs) + " designs sound at a in {0, 0.7, 30}; " +
              per_mode + "; max oracle/gamma " + fmt("%.6f", worst_ratio) +
              ", max full-order reconstruction residual " + fmt("%.2e", worst_resid) + " (tol " +
              fmt("%.0e", kResidualFactor * SynthesisRequest{}.eps) + "; other modes, not bounded: " +
              fmt("%.2e", worst_resid_other) + ")" + (first_bad4.empty() ? "" : "; " + first_bad4);
  c5.pass = ordered == static_cast<int>(runs.size());
  c5.detail = std::to_string(ordered) + "/" + std::to_string(runs.size()) + " plants with gamma(0) <= gamma(0.7) <= "
              "gamma(30)" + (first_bad5.empty() ? "" : "; " + first_bad5);
  report(4, "synthesis soundness", c4);
  report(5, "ordering of the three-level sweep", c5);
  ok4 = c4.pass;
  ok5 = c5.pass;
}

// ---------------------------------------------------------------- 6
struct Golden {
  std::string name;
  std::function<lmi::MaxdetProblem()> build;
  double optimum;
};

std::vector<Golden> golden_problems() {
  using lmi::AffineMatrix;
  using lmi::MaxdetProblem;
  using lmi::Sense;
  std::vector<Golden> g;
  g.push_back({"min x: [x 1; 1 x] >= 0", [] {
                 MaxdetProblem p;
                 const AffineMatrix x = p.scalar("x");
                 p.constrain("psd", lmi::vstack({lmi::hstack({x, AffineMatrix::scalar(1)}),
                                                  lmi::hstack({AffineMatrix::scalar(1), x})}),
                             Sense::positive_definite, false);
                 p.minimize(x);
                 return p;
               },
               1.0});
  g.push_back({"max t <= det(diag(1,4))^(1/2)", [] {
                 MaxdetProblem p;
                 MatrixXd D = MatrixXd::Zero(2, 2);
                 D.diagonal() << 1.0, 4.0;
                 p.minimize(-1.0 * p.detroot("t", AffineMatrix(D), 1.0));
                 return p;
               },
               -2.0});
  g.push_back({"max t <= det([4])", [] {
                 MaxdetProblem p;
                 p.minimize(-1.0 * p.detroot("t", AffineMatrix::scalar(4.0), 1.0));
                 return p;
               },
               -4.0});
  g.push_back({"max t <= 0.5 det(diag(4,9))^(1/2)", [] {
                 MaxdetProblem p;
                 MatrixXd D = MatrixXd::Zero(2, 2);
                 D.diagonal() << 4.0, 9.0;
                 p.minimize(-1.0 * p.detroot("t", AffineMatrix(D), 0.5));
                 return p;
               },
               -3.0});
  g.push_back({"max det(X)^(1/2): X <= diag(1,9)", [] {
                 MaxdetProblem p;
                 const AffineMatrix X = p.symmetric("X", 2);
                 MatrixXd D = MatrixXd::Zero(2, 2);
                 D.diagonal() << 1.0, 9.0;
                 p.constrain("cap", AffineMatrix(D) - X, Sense::positive_definite, false);
                 p.minimize(-1.0 * p.detroot("t", X, 1.0));
                 return p;
               },
               -3.0});
  g.push_back({"max det(X)^(1/3): tr X <= 3", [] {
                 MaxdetProblem p;
                 const AffineMatrix X = p.symmetric("X", 3);
                 AffineMatrix tr = AffineMatrix::scalar(3.0);
                 for (int i = 0; i < 3; ++i) tr -= X.block(i, i, 1, 1);
                 p.constrain("trace", tr, Sense::positive_definite, false);
                 p.minimize(-1.0 * p.detroot("t", X, 1.0));
                 return p;
               },
               -1.0});
  g.push_back({"min x1 + x2: x1 >= 1, x2 >= 2", [] {
                 MaxdetProblem p;
                 const AffineMatrix x1 = p.scalar("x1"), x2 = p.scalar("x2");
                 p.constrain("x1", x1 - AffineMatrix::scalar(1.0), Sense::positive_definite, false);
                 p.constrain("x2", x2 - AffineMatrix::scalar(2.0), Sense::positive_definite, false);
                 p.minimize(x1 + x2);
                 return p;
               },
               3.0});
  g.push_back({"min x: tridiag(1, x, 1) >= 0 (3x3)", [] {
                 MaxdetProblem p;
                 const AffineMatrix x = p.scalar("x");
                 MatrixXd T = MatrixXd::Zero(3, 3);
                 T(0, 1) = T(1, 0) = T(1, 2) = T(2, 1) = 1.0;
                 p.constrain("psd", AffineMatrix(T) + AffineMatrix::coordinate(0, MatrixXd::Identity(3, 3)),
                             Sense::positive_definite, false);
                 p.minimize(x);
                 return p;
               },
               std::sqrt(2.0)});
  const MatrixXd S = [] {
    MatrixXd M(3, 3);
    M << 2.0, -1.0, 0.5, -1.0, -1.0, 0.3, 0.5, 0.3, 0.5;
    return M;
  }();
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  const VectorXd ev = es.eigenvalues();
  g.push_back({"max lambda: S - lambda I >= 0", [S] {
                 MaxdetProblem p;
                 const AffineMatrix l = p.scalar("lambda");
                 p.constrain("psd", AffineMatrix(S) - lmi::AffineMatrix::coordinate(0, MatrixXd::Identity(3, 3)),
                             Sense::positive_definite, false);
                 p.minimize(-1.0 * l);
                 return p;
               },
               -ev(0)});
  g.push_back({"min lambda: lambda I - S >= 0", [S] {
                 MaxdetProblem p;
                 const AffineMatrix l = p.scalar("lambda");
                 p.constrain("psd", lmi::AffineMatrix::coordinate(0, MatrixXd::Identity(3, 3)) - AffineMatrix(S),
                             Sense::positive_definite, false);
                 p.minimize(l);
                 return p;
               },
               ev(2)});
  g.push_back({"min tr X: X >= S, X >= 0", [S] {
                 MaxdetProblem p;
                 const AffineMatrix X = p.symmetric("X", 3);
                 p.constrain("above", X - AffineMatrix(S), Sense::positive_definite, false);
                 p.constrain("psd", X, Sense::positive_definite, false);
                 AffineMatrix tr = AffineMatrix::scalar(0.0);
                 for (int i = 0; i < 3; ++i) tr += X.block(i, i, 1, 1);
                 p.minimize(tr);
                 return p;
               },
               ev.cwiseMax(0.0).sum()});
  const MatrixXd A = [] {
    MatrixXd M(2, 2);
    M << 0.5, 0.4, -0.3, 0.6;
    return M;
  }();
  g.push_back({"min tr P: A'PA - P + I <= 0", [A] {
                 MaxdetProblem p;
                 const AffineMatrix P = p.symmetric("P", 2);
                 p.constrain("lyap", MatrixXd(A.transpose()) * P * A - P + AffineMatrix::identity(2), Sense::negative_definite,
                             false);
                 AffineMatrix tr = AffineMatrix::scalar(0.0);
                 for (int i = 0; i < 2; ++i) tr += P.block(i, i, 1, 1);
                 p.minimize(tr);
                 return p;
               },
               dlyap(MatrixXd(A.transpose()), MatrixXd::Identity(2, 2)).trace()});
  return g;
}

bool bitwise_equal(const solver::Solution& a, const solver::Solution& b) {
  if (a.x.size() != b.x.size() || a.iterations != b.iterations) return false;
  for (int i = 0; i < a.x.size(); ++i)
    if (std::memcmp(&a.x(i), &b.x(i), sizeof(double)) != 0) return false;
  return std::memcmp(&a.objective, &b.objective, sizeof(double)) == 0;
}

void solver_criterion(bool& ok6) {
  Outcome c6;
  double worst = 0.0;
  int solved = 0, dual_ok = 0, det_ok = 0;
  std::string bad;
  solver::Options opts;
  opts.gap_tol = 1e-10;
  const auto problems = golden_problems();
  for (const Golden& g : problems) {
    const lmi::MaxdetProblem p = g.build();
    const solver::Solution s1 = solver::solve(p, opts);
    const solver::Solution s2 = solver::solve(p, opts);
    const double err = std::abs(s1.objective - g.optimum);
    worst = std::max(worst, err);
    if (s1.status == solver::Status::optimal && err <= kGoldenTol)
      ++solved;
    else if (bad.empty())
      bad = g.name + ": " + solver::to_string(s1.status) + fmt(" objective %.9g vs %.9g", s1.objective, g.optimum);
    if (s1.objective >= s1.dual_bound - opts.gap_tol * (1.0 + std::abs(s1.objective)) - 1e-12) ++dual_ok;
    if (bitwise_equal(s1, s2)) ++det_ok;
  }
  // Infeasible toy problem: x >= 1 and x <= 0.
  lmi::MaxdetProblem inf;
  const lmi::AffineMatrix x = inf.scalar("x");
  inf.constrain("lower", x - lmi::AffineMatrix::scalar(1.0), lmi::Sense::positive_definite, false);
  inf.constrain("upper", x, lmi::Sense::negative_definite, false);
  const bool certificate = solver::solve(inf).status == solver::Status::infeasible;
  const int total = static_cast<int>(problems.size());
  c6.pass = solved == total && dual_ok == total && det_ok == total && certificate && total >= 10;
  c6.detail = std::to_string(solved) + "/" + std::to_string(total) + " golden problems within 1e-6 (worst " +
              fmt("%.2e", worst) + "), weak duality " + std::to_string(dual_ok) + "/" + std::to_string(total) +
              ", bitwise determinism " + std::to_string(det_ok) + "/" + std::to_string(total) +
              ", infeasibility certificate " + (certificate ? "yes" : "no") + (bad.empty() ? "" : "; " + bad);
  report(6, "solver golden suite", c6);
  ok6 = c6.pass;
}

// ---------------------------------------------------------------- 7
double optimal_gamma_hat(const lmi::MaxdetProblem& p) {
  solver::Options o;
  o.gap_tol = 1e-11;
  const solver::Solution s = solver::solve(p, o);
  if (!s.has_point()) return NAN;
  return s.objective;
}

void duality_criterion(bool& ok7) {
  Outcome c7;
  Random rng(777);
  const double a = 0.7;
  double worst = 0.0;
  int compared = 0, skipped = 0;
  std::string cases;
  // Instances where either program is certified infeasible (both classes are
  // sufficient conditions only) are redrawn.
  for (int k = 0; k < 40 && compared < 5; ++k) {
    const int n = 2 + k % 3, mw = 2, pz = 1 + k % 2, py = 1 + (k / 2) % 2;
    PlantShape s{n, mw, 1, pz, py};
    PlantRealization filt = aniso::testing::random_plant(rng, s, 0.9);
    filt.Dyw.setZero();
    const PlantRealization ctrl = dual_plant(filt);  // Dzu = Dyw' = 0, Bu = Cy'
    const StructuralTransform tf = transform_singular_filtering(filt);
    const StructuralTransform tc = transform_singular_control(ctrl);
    const double gf = optimal_gamma_hat(
        lmi::build_sof_singular_filtering(apply_transform(filt, tf.T, tf.T_inv), a, std::nullopt));
    const double gc = optimal_gamma_hat(
        lmi::build_sof_singular_control(apply_transform(ctrl, tc.T, tc.T_inv), a, std::nullopt));
    if (!std::isfinite(gf) || !std::isfinite(gc)) {
      ++skipped;
      continue;
    }
    worst = std::max(worst, rel_diff(gc, gf));
    cases += fmt(" [%.6g vs %.6g]", gf, gc);
    ++compared;
  }
  c7.pass = compared == 5 && worst <= kDualityTol;
  c7.detail = fmt("max relative difference %.3e (tol 1e-6) on ", worst) + std::to_string(compared) + " instances (" +
              std::to_string(skipped) + " infeasible redrawn); optimal gamma^2, filtering vs transposed control:" +
              cases;
  report(7, "duality of the singular-control and singular-filtering programs", c7);
  ok7 = c7.pass;
}

// ---------------------------------------------------------------- 8
void simulation_criterion(const DesignRuns& d, bool& ok8) {
  const auto& runs = d.runs;
  Outcome c8;
  const double a = kSweep[1];
  int checked = 0, violations = 0;
  double worst = 0.0;
  std::vector<std::string> seen;
  for (const auto& [c, s] : runs) {
    const SynthesisReport& r = s.reports[1];
    if (!r.ok()) continue;
    const std::string mode = to_string(c.mode);
    if (std::count(seen.begin(), seen.end(), mode) >= 2) continue;
    seen.push_back(mode);
    const int mw = r.closed_loop.inputs();
    const ShapingFilter g = sim::first_order_filter(mw, sim::first_order_pole(mw, a));
    if (mean_anisotropy(g) > a + 1e-9) continue;
    sim::NoiseSpec spec = sim::NoiseSpec::shaped(g, 20000, 1000 + 17 * checked);
    const sim::GainEstimate e = sim::empirical_gain(r.closed_loop, spec, 10);
    for (double t : e.trials) {
      worst = std::max(worst, t / r.gamma);
      if (t > r.gamma + kSigmaFactor * e.stddev) ++violations;
    }
    ++checked;
  }
  c8.pass = checked >= 4 && violations == 0;
  c8.detail = std::to_string(checked) + " validated designs x 10 seeds under shaped noise with mean anisotropy a=0.7: " +
              std::to_string(violations) + " trials above gamma + 3 sigma; max empirical gain / gamma " +
              fmt("%.4f", worst);
  report(8, "simulation soft check", c8);
  ok8 = c8.pass;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok[9] = {};
  analysis_criteria(ok[1], ok[2], ok[3]);
  const auto runs = run_designs();
  synthesis_criteria(runs, ok[4], ok[5]);
  solver_criterion(ok[6]);
  duality_criterion(ok[7]);
  simulation_criterion(runs, ok[8]);
  int passed = 0;
  for (int i = 1; i <= 8; ++i) passed += ok[i];
  std::printf("acceptance: %d/8 criteria passed in %.1f s\n", passed, seconds_since(t0));
  return passed == 8 ? 0 : 1;
}
