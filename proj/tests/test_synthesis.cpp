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

#include <algorithm>

#include "aniso/errors.hpp"
#include "aniso/synthesis.hpp"
#include "support.hpp"

namespace aniso {
namespace {

using testing::PlantShape;
using testing::Random;

PlantRealization fi_plant(std::uint64_t seed, int n = 3, int mw = 2, int mu = 1, int pz = 1) {
  Random r(seed);
  return PlantRealization::full_information(r.with_radius(n, 1.1), r.gaussian(n, mw), r.gaussian(n, mu),
                                            r.gaussian(pz, n), 0.3 * r.gaussian(pz, mw), r.gaussian(pz, mu));
}

// Vanishing Tyu hidden behind an orthogonal change of coordinates.
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
  const Eigen::HouseholderQR<MatrixXd> qr(r.gaussian(n, n));
  const MatrixXd Q = qr.householderQ();
  return apply_transform(p, Q, Q.transpose());
}

void expect_sound(const SynthesisReport& rep) {
  ASSERT_TRUE(rep.ok()) << rep.message;
  EXPECT_TRUE(rep.stable);
  EXPECT_LT(rep.closed_loop.spectral_radius(), 1.0);
  EXPECT_TRUE(rep.certified);
  EXPECT_LE(rep.certified_gamma, rep.gamma * (1.0 + 1e-4));
  // The certified bound dominates the anisotropic norm computed independently.
  EXPECT_LE(rep.oracle.value, rep.gamma * (1.0 + 1e-3));
  EXPECT_GE(rep.gamma, rep.gamma_min * (1.0 - 1e-6));
}

TEST(Synthesis, ModeNamesRoundTrip) {
  for (DesignMode m : {DesignMode::state_feedback, DesignMode::full_order, DesignMode::sof_auto,
                       DesignMode::sof_structural, DesignMode::sof_singular_control,
                       DesignMode::sof_singular_filtering, DesignMode::fixed_order})
    EXPECT_EQ(design_mode_from_string(to_string(m)), m);
  EXPECT_THROW(design_mode_from_string("pid"), std::invalid_argument);
}

TEST(Synthesis, StateFeedbackDesignIsCertified) {
  SynthesisRequest req;
  req.plant = fi_plant(11);
  req.a = 0.5;
  const SynthesisReport rep = synthesize(req);
  expect_sound(rep);
  EXPECT_EQ(rep.controller.order(), 0);
  ASSERT_TRUE(rep.reconstruction_residual.has_value());
  EXPECT_LT(*rep.reconstruction_residual, 0.0);
  const ClosedLoopRealization cl = close_loop_state_feedback(req.plant, rep.controller.Dc);
  EXPECT_TRUE(cl.A.isApprox(rep.closed_loop.A, 1e-12));
}

TEST(Synthesis, FixedBoundFeasibilityBracketsTheOptimum) {
  SynthesisRequest req;
  req.plant = fi_plant(12);
  req.a = 0.3;
  const SynthesisReport opt = synthesize(req);
  ASSERT_TRUE(opt.ok()) << opt.message;
  req.gamma = 1.2 * opt.gamma;
  const SynthesisReport above = synthesize(req);
  expect_sound(above);
  EXPECT_LE(above.certified_gamma, 1.2 * opt.gamma * (1.0 + 1e-4));
  req.gamma = 0.8 * opt.gamma;
  EXPECT_EQ(synthesize(req).status, SynthesisStatus::infeasible);
}

TEST(Synthesis, FullOrderDesignIsCertified) {
  Random r(13);
  PlantRealization p = testing::random_plant(r, PlantShape{3, 2, 1, 1, 1}, 1.1);
  SynthesisRequest req;
  req.plant = p;
  req.mode = DesignMode::full_order;
  req.a = 0.7;
  const SynthesisReport rep = synthesize(req);
  expect_sound(rep);
  EXPECT_EQ(rep.controller.order(), 3);
  const ClosedLoopRealization cl = close_loop_dynamic(p, rep.controller);
  EXPECT_LT(cl.spectral_radius(), 1.0);
  EXPECT_GT(rep.coupling_min_singular, 0.0);
}

TEST(Synthesis, StateFeedbackBoundsFullOrderFromBelow) {
  // Full information is the best any controller can do.
  PlantRealization p = fi_plant(14, 2, 1, 1, 1);
  SynthesisRequest req;
  req.plant = p;
  req.a = 0.4;
  const SynthesisReport sf = synthesize(req);
  req.mode = DesignMode::full_order;
  const SynthesisReport fo = synthesize(req);
  ASSERT_TRUE(sf.ok() && fo.ok()) << sf.message << " / " << fo.message;
  EXPECT_LE(sf.gamma, fo.gamma * (1.0 + 1e-4));
}

TEST(Synthesis, DetectsStaticOutputFeedbackClasses) {
  Random r(15);
  EXPECT_EQ(detect_sof_class(structural_plant(r, 2, 1, 1, 1, 1, 1)), "structural");
  PlantRealization p = testing::random_plant(r, PlantShape{3, 2, 1, 1, 1}, 0.9);
  EXPECT_EQ(detect_sof_class(p), std::nullopt);
  PlantRealization c = p;
  c.Dzu.setZero();
  EXPECT_EQ(detect_sof_class(c), "singular-control");
  PlantRealization f = p;
  f.Dyw.setZero();
  EXPECT_EQ(detect_sof_class(f), "singular-filtering");
}

TEST(Synthesis, StructuralStaticDesignIsCertified) {
  Random r(16);
  SynthesisRequest req;
  req.plant = structural_plant(r, 2, 1, 2, 1, 1, 1);
  req.mode = DesignMode::sof_auto;
  req.a = 0.5;
  const SynthesisReport rep = synthesize(req);
  expect_sound(rep);
  EXPECT_EQ(rep.design_class, "structural");
  const ClosedLoopRealization cl = close_loop_static_output(req.plant, rep.controller.Dc);
  EXPECT_TRUE(cl.A.isApprox(rep.closed_loop.A, 1e-10));
}

TEST(Synthesis, GainMaskIsRespected) {
  Random r(17);
  SynthesisRequest req;
  req.plant = structural_plant(r, 2, 2, 1, 2, 1, 2);
  req.mode = DesignMode::sof_structural;
  req.a = 0.2;
  MatrixXd mask(2, 2);
  mask << 1, 0, 0, 1;
  req.mask = mask;
  const SynthesisReport rep = synthesize(req);
  expect_sound(rep);
  EXPECT_EQ(rep.controller.Dc(0, 1), 0.0);
  EXPECT_EQ(rep.controller.Dc(1, 0), 0.0);
}

TEST(Synthesis, MasksOnlyApplyToTheStructuralClass) {
  Random r(18);
  PlantRealization p = testing::random_plant(r, PlantShape{3, 1, 1, 1, 1}, 0.9);
  p.Dzu.setZero();
  SynthesisRequest req;
  req.plant = p;
  req.mode = DesignMode::sof_singular_control;
  req.mask = MatrixXd::Ones(1, 1);
  EXPECT_THROW(synthesize(req), StructuralPropertyViolation);
}

TEST(Synthesis, ClassPreconditionsAreEnforced) {
  Random r(19);
  const PlantRealization p = testing::random_plant(r, PlantShape{3, 2, 1, 1, 1}, 0.9);
  SynthesisRequest req;
  req.plant = p;
  req.mode = DesignMode::state_feedback;
  EXPECT_THROW(synthesize(req), StructuralPropertyViolation);
  req.mode = DesignMode::sof_auto;
  EXPECT_THROW(synthesize(req), NoConvexClassApplies);
  req.mode = DesignMode::sof_singular_control;
  EXPECT_THROW(synthesize(req), NoConvexClassApplies);
  req.mode = DesignMode::sof_singular_filtering;
  EXPECT_THROW(synthesize(req), NoConvexClassApplies);
  req.mode = DesignMode::sof_structural;
  EXPECT_THROW(synthesize(req), NoConvexClassApplies);
  req.mode = DesignMode::fixed_order;
  req.order = 1;
  EXPECT_THROW(synthesize(req), NoConvexClassApplies);
  req.order = -1;
  EXPECT_THROW(synthesize(req), std::invalid_argument);
}

TEST(Synthesis, UnstabilizablePlantsAreRejected) {
  PlantRealization p = fi_plant(20, 2, 1, 1, 1);
  p.A = MatrixXd::Zero(2, 2);
  p.A(0, 0) = 1.5;
  p.A(1, 1) = 0.5;
  p.Bu = MatrixXd::Zero(2, 1);
  p.Bu(1, 0) = 1.0;
  SynthesisRequest req;
  req.plant = p;
  EXPECT_THROW(synthesize(req), InadmissiblePlant);
  p.Bu(0, 0) = 1e-9;  // barely stabilizable
  req.plant = p;
  EXPECT_THROW(synthesize(req), InadmissiblePlant);
}

TEST(Synthesis, FixedOrderDesignIsCertified) {
  Random r(21);
  PlantRealization p = testing::random_plant(r, PlantShape{3, 1, 1, 1, 1}, 0.9);
  p.Dzu.setZero();
  SynthesisRequest req;
  req.plant = p;
  req.mode = DesignMode::fixed_order;
  req.order = 1;
  req.a = 0.3;
  const SynthesisReport rep = synthesize(req);
  expect_sound(rep);
  EXPECT_EQ(rep.controller.order(), 1);
  const ClosedLoopRealization cl = close_loop_dynamic(p, rep.controller);
  EXPECT_LT(cl.spectral_radius(), 1.0);
}

TEST(Synthesis, SweepIsMonotoneInTheLevel) {
  SynthesisRequest req;
  req.plant = fi_plant(22);
  const std::vector<double> levels{2.0, 0.0, 0.5, 10.0};
  const std::vector<SynthesisReport> reps = synthesize_sweep(req, levels);
  ASSERT_EQ(reps.size(), levels.size());
  for (size_t i = 0; i < reps.size(); ++i) {
    ASSERT_TRUE(reps[i].ok()) << reps[i].message;
    EXPECT_EQ(reps[i].a, levels[i]);
  }
  std::vector<size_t> order{1, 2, 0, 3};
  for (size_t k = 1; k < order.size(); ++k) EXPECT_LE(reps[order[k - 1]].gamma, reps[order[k]].gamma);
}

TEST(Synthesis, RecoveryRejectsSingularCoupling) {
  Random r(23);
  const PlantRealization p = testing::random_plant(r, PlantShape{2, 1, 1, 1, 1}, 0.9);
  const MatrixXd Pi = r.spd(2);
  const MatrixXd Phi = Pi.inverse();
  EXPECT_THROW(recover_full_order(p, Pi, Phi, MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 1), MatrixXd::Zero(1, 2),
                                  MatrixXd::Zero(1, 1)),
               ReconstructionDegenerate);
}

TEST(Synthesis, RecoveryReturnsConsistentLyapunovPair) {
  Random r(24);
  const PlantRealization p = testing::random_plant(r, PlantShape{2, 1, 1, 1, 1}, 0.9);
  const MatrixXd Pi = r.spd(2), Phi = 2.0 * r.spd(2);
  const FullOrderRecovery rec =
      recover_full_order(p, Pi, Phi, r.gaussian(2, 2), r.gaussian(2, 1), r.gaussian(1, 2), r.gaussian(1, 1));
  EXPECT_EQ(rec.controller.order(), 2);
  EXPECT_TRUE((rec.Phi * rec.Pi).isApprox(MatrixXd::Identity(4, 4), 1e-9));
  EXPECT_GT(rec.coupling_min_singular, 0.0);
}

TEST(Synthesis, ValidationRejectsDestabilizingControllers) {
  const PlantRealization p = fi_plant(25);
  const ControllerRealization k = ControllerRealization::static_gain(MatrixXd::Constant(1, 3, 50.0));
  const SynthesisReport rep = validate_design(p, k, 0.5, 10.0);
  EXPECT_FALSE(rep.ok());
  EXPECT_FALSE(rep.stable);
}

}  // namespace
}  // namespace aniso
