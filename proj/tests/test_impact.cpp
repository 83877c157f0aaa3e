#include <gtest/gtest.h>

#include <random>

#include "multimpact/error.hpp"
#include "multimpact/impact.hpp"
#include "multimpact/scene.hpp"

using namespace multimpact;

namespace {

VectorXd one(double x) { return VectorXd::Constant(1, x); }

}  // namespace

TEST(Assemble, BallBlocks) {
  const ImpactProblem p = one_dof_ball();
  const AssembledLcp a = assemble_impact_lcp(p, one(-1.0), one(2.0));
  ASSERT_EQ(a.layout.size, 5);
  VectorXd q(5);
  q << 2, -1, 0, 0, 0;
  EXPECT_TRUE(a.lcp.q.isApprox(q));
  MatrixXd M(5, 5);
  // clang-format off
  M << 0, -1,  0,  0,  0,
       1,  1,  0,  0,  0,
       0,  0,  0,  0,  1,
       0,  0,  0,  0,  1,
       0,  1, -1, -1,  0;
  // clang-format on
  EXPECT_TRUE(a.lcp.M.isApprox(M)) << a.lcp.M;
}

TEST(Assemble, PhoneSize) {
  const Example ex = build_example("phone");
  const AssembledLcp a = assemble_impact_lcp(ex.problem, ex.v0, VectorXd::Ones(2));
  EXPECT_EQ(a.layout.size, 10);
  EXPECT_EQ(a.layout.beta.size, 4);
}

TEST(SimStep, BallStopsWithinCap) {
  const ImpactProblem p = one_dof_ball();
  const StepRecord s = sim_step(p, one(-1.0), one(2.0));
  EXPECT_TRUE(s.solver_invoked);
  EXPECT_NEAR(s.v_after[0], 0.0, 1e-12);
  EXPECT_NEAR(s.lambda_n[0], 1.0, 1e-12);
}

TEST(SimStep, BallFullActivation) {
  const ImpactProblem p = one_dof_ball();
  const StepRecord s = sim_step(p, one(-1.0), one(0.25));
  EXPECT_NEAR(s.v_after[0], -0.75, 1e-12);
  EXPECT_NEAR(s.lambda_n[0], 0.25, 1e-12);
}

TEST(SimStep, ZeroImpulseAndSeparatingAreExact) {
  const Example ex = build_example("disk_stack");
  const StepRecord z = sim_step(ex.problem, ex.v0, VectorXd::Zero(5));
  EXPECT_FALSE(z.solver_invoked);
  EXPECT_EQ(z.v_after, ex.v0);
  const VectorXd up = -ex.v0;
  const StepRecord s = sim_step(ex.problem, up, VectorXd::Ones(5));
  EXPECT_FALSE(s.solver_invoked);
  EXPECT_EQ(s.v_after, up);
}

TEST(SimStep, CapsAndConeHoldOnRandomSteps) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& name : builtin_names()) {
    const Example ex = build_example(name);
    const int m = ex.problem.num_contacts();
    for (int k = 0; k < 300; ++k) {
      const VectorXd v = (0.2 + u(rng)) * ex.v0;
      VectorXd lam(m);
      for (int i = 0; i < m; ++i) lam[i] = ex.defaults.h * u(rng);
      const StepRecord s = sim_step(ex.problem, v, lam);
      if (!s.solver_invoked) continue;
      EXPECT_GE(s.lambda_n.minCoeff(), -1e-9) << name;
      EXPECT_LE((s.lambda_n - lam).maxCoeff(), 1e-9) << name;
      EXPECT_LE(s.energy_after, s.energy_before + 1e-12) << name;
      EXPECT_TRUE(in_linear_cone(ex.problem, s.v_after, s.lambda_n, s.beta, 1e-8)) << name;
    }
  }
}

TEST(Sim, BallTerminatesQuickly) {
  const ImpactProblem p = one_dof_ball();
  for (double draw : {0.5, 0.7, 1.0}) {
    BlockSampler s(std::vector<double>(4, draw), "fixed");
    const Trajectory t = sim(p, one(-1.0), 2.0, 10, s);
    EXPECT_TRUE(t.terminated);
    EXPECT_GE(t.steps.size(), 1u);
    EXPECT_LE(t.steps.size(), 2u);
    EXPECT_NEAR(t.final_velocity()[0], 0.0, 1e-12);
  }
}

TEST(Sim, SeparatingStartHasNoSteps) {
  UniformSampler s(1);
  const Trajectory t = sim(one_dof_ball(), one(1.0), 1.0, 10, s);
  EXPECT_TRUE(t.terminated);
  EXPECT_TRUE(t.steps.empty());
}

TEST(Sim, StepBudgetLeavesImpactingState) {
  UniformSampler s(1);
  const Trajectory t = sim(one_dof_ball(), one(-1.0), 0.01, 3, s);
  EXPECT_FALSE(t.terminated);
  EXPECT_EQ(t.steps.size(), 3u);
}

TEST(Sim, PhoneTerminatesForManySeeds) {
  const Example ex = build_example("phone");
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    UniformSampler s(derive_seed(seed, 0));
    const Trajectory t = sim(ex.problem, ex.v0, 0.3, 10, s, {}, seed);
    ASSERT_TRUE(t.terminated) << seed;
    EXPECT_FALSE(is_impacting(ex.problem, t.final_velocity()));
  }
}

TEST(Anitescu, BallPhoneBoxComeToRest) {
  EXPECT_NEAR(anitescu_resolve(one_dof_ball(), one(-1.0)).v_plus[0], 0.0, 1e-12);
  for (const char* name : {"phone", "box_wall"}) {
    const Example ex = build_example(name);
    EXPECT_LE(anitescu_resolve(ex.problem, ex.v0).v_plus.lpNorm<Eigen::Infinity>(), 1e-8)
        << name;
  }
}

TEST(Sequential, PhoneMirrorAndBoxWall) {
  const Example phone = build_example("phone");
  const ImpactProblem& p = phone.problem;
  const VectorXd a_first = sequential_resolve(p, phone.v0, {0}).final_velocity();
  const VectorXd vn = p.jn() * a_first;
  // A first: pivot about B, A lifts.
  EXPECT_GT(vn[0], 1e-6);
  EXPECT_LE(std::abs(vn[1]), 1e-9);
  const VectorXd b_first = sequential_resolve(p, phone.v0, {1}).final_velocity();
  EXPECT_LE((reflect_map("phone") * a_first - b_first).norm(), 1e-9);

  const Example box = build_example("box_wall");
  const ImpactProblem& q = box.problem;
  const VectorXd v = sequential_resolve(q, box.v0, {1, 0}).final_velocity();
  EXPECT_GT((q.jn().row(1) * v)(0), 1e-6);
  EXPECT_LT((q.jt().row(0) * v)(0), -1e-6);
}

TEST(Sequential, RejectsBadOrder) {
  const Example ex = build_example("phone");
  EXPECT_THROW(sequential_resolve(ex.problem, ex.v0, {7}), Error);
}

TEST(RVector, HandCases) {
  const VectorXd r_ball = compute_r(one_dof_ball());
  ASSERT_EQ(r_ball.size(), 1);
  EXPECT_NEAR(r_ball[0], 1.0, 1e-10);

  const ImpactProblem two = ImpactProblem::from_tangent(
      MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2),
      VectorXd::Constant(2, 0.5));
  const VectorXd r2 = compute_r(two);
  EXPECT_NEAR(r2[0], 1.0, 1e-10);
  EXPECT_NEAR(r2[1], 1.0, 1e-10);

  try {
    compute_r(jamming_problem());
    FAIL() << "jamming accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonDegeneracyViolation);
  }
}

TEST(RVector, AllExamples) {
  for (const auto& name : builtin_names()) {
    const Example ex = build_example(name);
    EXPECT_NO_THROW(compute_r(ex.problem)) << name;
  }
}

TEST(Termination, BallConstant) {
  const TerminationConstant tc = termination_constant(one_dof_ball(), 1.0);
  EXPECT_EQ(tc.c, 8);
  EXPECT_DOUBLE_EQ(tc.tail_bound(0), 1.0);
  EXPECT_NEAR(tc.tail_bound(4), std::exp(-1.0), 1e-15);
}

TEST(Termination, PhoneFinitePositive) {
  const Example ex = build_example("phone");
  const TerminationConstant tc = termination_constant(ex.problem, 0.3);
  EXPECT_GT(tc.c, 0);
  EXPECT_EQ(tc.contacts, 2);
}
