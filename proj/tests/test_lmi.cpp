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
#include <gtest/gtest.h>

#include <cmath>

#include "aniso/lmi.hpp"
#include "aniso/solver.hpp"
#include "aniso/spectral.hpp"
#include "support.hpp"

namespace aniso {
namespace {

using lmi::AffineMatrix;
using lmi::MaxdetProblem;
using lmi::Sense;
using testing::Random;

VectorXd random_point(Random& r, int m) { return r.gaussian(m, 1); }

MatrixXd block_value(const MaxdetProblem& p, const std::string& name, const VectorXd& x) {
  for (const auto& b : p.blocks())
    if (b.name == name) return b.expr.evaluate(x);
  ADD_FAILURE() << "no block " << name;
  return {};
}

TEST(Lmi, AffineAlgebraAgreesWithDenseEvaluation) {
  Random r(31);
  MaxdetProblem p;
  const AffineMatrix X = p.symmetric("X", 3);
  const AffineMatrix Y = p.full("Y", 3, 2);
  const VectorXd x = random_point(r, p.num_coords());
  const MatrixXd Xv = p.value("X", x), Yv = p.value("Y", x);
  EXPECT_TRUE(Xv.isApprox(Xv.transpose()));
  EXPECT_TRUE(X.evaluate(x).isApprox(Xv));
  const MatrixXd L = r.gaussian(2, 3), M = r.gaussian(3, 3), C = r.gaussian(2, 2), R = r.gaussian(2, 4);
  const AffineMatrix E = L * Y + AffineMatrix(C) - 2.0 * (Y.transpose() * M).block(0, 0, 2, 2) + L * X * L.transpose();
  const MatrixXd expected = L * Yv + C - 2.0 * (Yv.transpose() * M).block(0, 0, 2, 2) + L * Xv * L.transpose();
  EXPECT_LT((E.evaluate(x) - expected).cwiseAbs().maxCoeff(), 1e-12);
  const AffineMatrix S = lmi::vstack({lmi::hstack({X, Y}), lmi::hstack({Y.transpose(), AffineMatrix::identity(2)})});
  MatrixXd dense(5, 5);
  dense << Xv, Yv, Yv.transpose(), MatrixXd::Identity(2, 2);
  EXPECT_TRUE(S.evaluate(x).isApprox(dense));
  EXPECT_TRUE(S.is_symmetric(1e-15));
  EXPECT_TRUE((E * R).evaluate(x).isApprox(expected * R));
}

TEST(Lmi, StackingRejectsInconsistentBlocks) {
  EXPECT_THROW(lmi::hstack({AffineMatrix::zero(2, 1), AffineMatrix::zero(3, 1)}), DimensionMismatch);
  EXPECT_THROW(lmi::vstack({AffineMatrix::zero(2, 1), AffineMatrix::zero(2, 2)}), DimensionMismatch);
}

TEST(Lmi, SymmetricBlocksAreStructurallySymmetric) {
  Random r(32);
  MaxdetProblem p;
  const AffineMatrix Y = p.full("Y", 2, 3);
  lmi::SymmetricBlocks sb({3, 2});
  sb.set(0, 0, AffineMatrix(r.spd(3)));
  sb.set(1, 0, Y);
  const AffineMatrix M = sb.build();
  EXPECT_TRUE(M.is_symmetric());
  const VectorXd x = random_point(r, p.num_coords());
  EXPECT_TRUE(M.evaluate(x).block(0, 3, 3, 2).isApprox(p.value("Y", x).transpose()));
  EXPECT_TRUE(M.evaluate(x).block(3, 3, 2, 2).isZero(0.0));
}

TEST(Lmi, PatternedVariablesOnlyAllocateFreeEntries) {
  MaxdetProblem p;
  MatrixXd mask(2, 3);
  mask << 1, 0, 1, 0, 1, 0;
  const AffineMatrix K = p.patterned("K", mask);
  EXPECT_EQ(p.num_coords(), 3);
  const MatrixXd v = K.evaluate(VectorXd::Ones(3));
  EXPECT_EQ(v, mask);
}

TEST(Lmi, StrictnessMarginScalesWithTheData) {
  MaxdetProblem p;
  const AffineMatrix x = p.scalar("x");
  p.constrain("strict", x - AffineMatrix::scalar(10.0), Sense::positive_definite, true);
  p.constrain("plain", x, Sense::positive_definite, false);
  const MaxdetProblem q = lmi::strictness_margin(p, 1e-3);
  EXPECT_NEAR(q.blocks()[0].margin, 1e-3 * 11.0, 1e-15);
  EXPECT_EQ(q.blocks()[1].margin, 0.0);
  EXPECT_THROW(lmi::strictness_margin(p, -1.0), std::invalid_argument);
}

TEST(Lmi, CheckPointReportsViolations) {
  MaxdetProblem p;
  const AffineMatrix x = p.scalar("x");
  p.constrain("upper", x - AffineMatrix::scalar(1.0), Sense::negative_definite, false);
  p.minimize(x);
  const lmi::ResidualReport ok = lmi::check_point(p, VectorXd::Constant(1, 0.5));
  EXPECT_TRUE(ok.all_satisfied);
  EXPECT_NEAR(ok.objective, 0.5, 1e-15);
  const lmi::ResidualReport bad = lmi::check_point(p, VectorXd::Constant(1, 2.0));
  EXPECT_FALSE(bad.all_satisfied);
  EXPECT_NEAR(bad.worst_violation, 1.0, 1e-12);
}

TEST(Lmi, DetRootEncodingIsTight) {
  // max t s.t. t <= s det(Psi)^(1/m) for a constant Psi gives t = s det^(1/m).
  Random r(33);
  for (int m = 1; m <= 5; ++m) {
    const MatrixXd Psi = r.spd(m, 0.5);
    const double s = 0.5 + 0.25 * m;
    MaxdetProblem p;
    p.minimize(-1.0 * p.detroot("t", AffineMatrix(Psi), s));
    solver::Options o;
    o.gap_tol = 1e-11;
    const solver::Solution sol = solver::solve(p, o);
    ASSERT_EQ(sol.status, solver::Status::optimal) << sol.message;
    const double expected = s * std::pow(Psi.determinant(), 1.0 / m);
    EXPECT_NEAR(-sol.objective, expected, 1e-7 * expected) << "m=" << m;
    const lmi::ResidualReport rep = solver::verify(p, sol);
    ASSERT_EQ(rep.detroot_slack.size(), 1u);
    EXPECT_GE(rep.detroot_slack[0], -1e-7 * expected);
  }
}

TEST(Lmi, DetRootEncodingAddsAuxiliaryBlocks) {
  MaxdetProblem p;
  const AffineMatrix X = p.symmetric("X", 3);
  p.detroot("t", X, 1.0);
  const MaxdetProblem e = lmi::encode_detroots(p);
  EXPECT_TRUE(e.detroots().empty());
  EXPECT_GT(e.blocks().size(), p.blocks().size());
  EXPECT_GT(e.num_coords(), p.num_coords());
}

TEST(Lmi, AnalysisBlocksMatchHandAssembledMatrices) {
  Random r(34);
  const ClosedLoopRealization s = testing::random_stable_system(r, 3, 2, 2, 0.8);
  const double a = 0.4;
  const MaxdetProblem p = lmi::build_sanbrl(s, a, std::nullopt, 0.0);
  ASSERT_FALSE(p.meta.count("limit_form"));
  const VectorXd x = random_point(r, p.num_coords());
  const MatrixXd Phi = p.value("Phi", x), Psi = p.value("Psi", x);
  const double eta = p.expressions.at("eta").value(x);
  const double gh = p.expressions.at("gamma_hat").value(x);
  EXPECT_NEAR(eta, gh + lmi::entropy_scale(a, 2) * p.value("eta_excess", x)(0, 0), 1e-12);
  const MatrixXd &A = s.A, &B = s.B, &C = s.C, &D = s.D;
  MatrixXd L(5, 5);
  L << A.transpose() * Phi * A - Phi + C.transpose() * C, A.transpose() * Phi * B + C.transpose() * D,
      B.transpose() * Phi * A + D.transpose() * C, B.transpose() * Phi * B + D.transpose() * D - eta * MatrixXd::Identity(2, 2);
  EXPECT_LT((block_value(p, "lyapunov", x) - L).cwiseAbs().maxCoeff(), 1e-12);
  const MatrixXd W = Psi - eta * MatrixXd::Identity(2, 2) + B.transpose() * Phi * B + D.transpose() * D;
  EXPECT_LT((block_value(p, "psi_bound", x) - W).cwiseAbs().maxCoeff(), 1e-12);
  ASSERT_EQ(p.detroots().size(), 1u);
  EXPECT_NEAR(p.detroots()[0].scale, lmi::entropy_scale(a, 2), 1e-15);
}

TEST(Lmi, ZeroAnisotropyUsesTheLimitForm) {
  Random r(35);
  const ClosedLoopRealization s = testing::random_stable_system(r, 2, 3, 1, 0.8);
  const MaxdetProblem p = lmi::build_sanbrl(s, 0.0, std::nullopt);
  EXPECT_EQ(p.meta.at("limit_form"), 1.0);
  EXPECT_FALSE(p.expressions.count("eta"));
  EXPECT_TRUE(p.has_variable("Xi"));
  EXPECT_TRUE(p.detroots().empty());
  // The Lyapunov block loses its w rows and columns.
  for (const auto& b : p.blocks())
    if (b.name == "lyapunov") EXPECT_EQ(b.expr.rows(), 2);
}

TEST(Lmi, BuildersRejectBadArguments) {
  Random r(36);
  const ClosedLoopRealization s = testing::random_stable_system(r, 2, 1, 1, 0.8);
  EXPECT_THROW(lmi::build_sanbrl(s, -1.0, std::nullopt), std::invalid_argument);
  EXPECT_THROW(lmi::build_sanbrl(s, 0.5, 0.0), std::invalid_argument);
  ClosedLoopRealization u = s;
  u.A *= 2.0 / s.spectral_radius();
  EXPECT_THROW(lmi::build_sanbrl(u, 0.5, std::nullopt), UnstableSystem);
  PlantRealization p = testing::random_plant(r, {3, 1, 1, 1, 1}, 0.8);
  EXPECT_THROW(lmi::build_sof_singular_control(p, 0.5, std::nullopt), StructuralPropertyViolation);
  EXPECT_THROW(lmi::build_sof_singular_filtering(p, 0.5, std::nullopt), StructuralPropertyViolation);
}

TEST(Lmi, AnalysisOptimumSatisfiesTheReciprocalForm) {
  // The (Phi, Pi = Phi^-1) form is equivalent to the analysis program; its
  // dense evaluator must accept the solver's point.
  Random r(37);
  for (double a : {0.0, 0.6, 4.0}) {
    const ClosedLoopRealization s = testing::random_stable_system(r, 3, 2, 1, 0.8);
    const double g = 1.05 * anisotropic_norm_oracle(s, a).value;
    const MaxdetProblem p = lmi::build_sanbrl(s, a, g);
    const solver::Solution sol = solver::solve(p);
    ASSERT_TRUE(sol.has_point()) << sol.message;
    const MatrixXd Phi = p.value("Phi", sol.x);
    const bool limit = a == 0.0;
    const MatrixXd Psi = limit ? p.value("Xi", sol.x) : p.value("Psi", sol.x);
    const double eta = limit ? INFINITY : p.expressions.at("eta").value(sol.x);
    const lmi::ReciprocalResidual res = lmi::evaluate_reciprocal_conditions(s, a, g * g, eta, Psi, Phi, Phi.inverse());
    EXPECT_LT(res.lmi3_max_eig, 0.0) << "a=" << a;
    EXPECT_LT(res.lmi4_max_eig, 0.0) << "a=" << a;
    EXPECT_LT(res.det_slack, 1e-9 * g * g) << "a=" << a;
    EXPECT_LT(res.reciprocity, 1e-8);
  }
}

TEST(Lmi, AnalysisFeasibilityIsMonotoneInGamma) {
  Random r(38);
  const ClosedLoopRealization s = testing::random_stable_system(r, 3, 2, 2, 0.85);
  for (double a : {0.0, 0.8}) {
    const double g = anisotropic_norm_oracle(s, a).value;
    EXPECT_TRUE(solver::solve(lmi::build_sanbrl(s, a, 1.01 * g)).has_point()) << "a=" << a;
    EXPECT_EQ(solver::solve(lmi::build_sanbrl(s, a, 0.99 * g)).status, solver::Status::infeasible) << "a=" << a;
  }
}

TEST(Lmi, DumpIsDeterministic) {
  Random r(39);
  const ClosedLoopRealization s = testing::random_stable_system(r, 2, 1, 1, 0.8);
  const std::string d1 = lmi::dump_problem(lmi::build_sanbrl(s, 0.3, std::nullopt));
  const std::string d2 = lmi::dump_problem(lmi::build_sanbrl(s, 0.3, std::nullopt));
  EXPECT_EQ(d1, d2);
  EXPECT_NE(d1.find("lyapunov"), std::string::npos);
}

}  // namespace
}  // namespace aniso
