#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "multimpact/error.hpp"
#include "multimpact/outcomes.hpp"
#include "multimpact/sampling.hpp"
#include "multimpact/scene.hpp"
#include "multimpact/set_approximation.hpp"

using namespace multimpact;

namespace {

// Reference values produced independently with scipy.stats.qmc.Sobol
// (scramble=False), rows = point index.
const double kSobol5[9][5] = {
    {0, 0, 0, 0, 0},
    {.5, .5, .5, .5, .5},
    {.75, .25, .25, .25, .75},
    {.25, .75, .75, .75, .25},
    {.375, .375, .625, .875, .375},
    {.875, .875, .125, .375, .875},
    {.625, .125, .875, .625, .625},
    {.125, .625, .375, .125, .125},
    {.1875, .3125, .9375, .4375, .5625},
};

struct WideRef {
  std::uint64_t index;
  double v[5];  // columns 0, 19, 49, 127, 255
};
const WideRef kSobol256[] = {
    {100, {0.4140625, 0.3359375, 0.6640625, 0.4609375, 0.5703125}},
    {777, {0.6923828125, 0.7529296875, 0.9521484375, 0.1181640625, 0.6357421875}},
    {1023, {0.0009765625, 0.3193359375, 0.8232421875, 0.7001953125, 0.8427734375}},
};

// Largest empty-box style discrepancy over anchored boxes on a grid.
double star_discrepancy(const std::vector<std::array<double, 2>>& pts) {
  double worst = 0.0;
  const int g = 32;
  for (int i = 1; i <= g; ++i) {
    for (int j = 1; j <= g; ++j) {
      const double a = static_cast<double>(i) / g, b = static_cast<double>(j) / g;
      std::size_t inside = 0;
      for (const auto& p : pts) inside += p[0] < a && p[1] < b;
      worst = std::max(worst, std::abs(static_cast<double>(inside) / pts.size() - a * b));
    }
  }
  return worst;
}

}  // namespace

TEST(Sobol, FirstPointsOfDimensionOne) {
  SobolStream s(1);
  EXPECT_EQ(s.next()[0], 0.5);
  EXPECT_EQ(s.next()[0], 0.75);
  EXPECT_EQ(s.next()[0], 0.25);
}

TEST(Sobol, MatchesReferenceInFiveDimensions) {
  SobolStream s(5, false);
  for (int i = 0; i < 9; ++i) {
    const auto p = s.next();
    for (int d = 0; d < 5; ++d) EXPECT_EQ(p[d], kSobol5[i][d]) << i << "," << d;
  }
}

TEST(Sobol, MatchesReferenceAtFullWidth) {
  SobolStream s(256);
  std::vector<double> out(256);
  const int cols[5] = {0, 19, 49, 127, 255};
  for (const auto& ref : kSobol256) {
    s.point(ref.index, out);
    for (int c = 0; c < 5; ++c) EXPECT_EQ(out[cols[c]], ref.v[c]) << ref.index;
  }
}

TEST(Sobol, RandomAccessMatchesSequential) {
  SobolStream seq(7);
  SobolStream ra(7);
  std::vector<double> a(7);
  for (std::uint64_t k = 1; k < 300; ++k) {
    const auto b = seq.next();
    ra.point(k, a);
    ASSERT_EQ(std::vector<double>(a.begin(), a.end()), b) << k;
  }
  ra.seek(50);
  seq.seek(50);
  EXPECT_EQ(ra.next(), seq.next());
}

TEST(Sobol, SkipZeroAndDimensionLimits) {
  SobolStream s(3);
  const auto p = s.next();
  EXPECT_FALSE(std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; }));
  EXPECT_THROW(SobolStream(0), Error);
  EXPECT_THROW(SobolStream(SobolStream::max_dimension() + 1), Error);
}

TEST(Sobol, LowerDiscrepancyThanPseudoRandom) {
  SobolStream s(2);
  std::vector<std::array<double, 2>> pts(1024);
  for (auto& p : pts) {
    const auto x = s.next();
    p = {x[0], x[1]};
  }
  const double sobol = star_discrepancy(pts);
  double mean = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    UniformSampler u(seed);
    std::vector<double> x(2);
    for (auto& p : pts) {
      u.draw(x);
      p = {x[0], x[1]};
    }
    mean += star_discrepancy(pts) / 20.0;
  }
  EXPECT_LT(sobol, mean);
}

TEST(Samplers, UniformInUnitIntervalAndSeeded) {
  UniformSampler a(42), b(42);
  std::vector<double> x(1000), y(1000);
  a.draw(x);
  b.draw(y);
  EXPECT_EQ(x, y);
  for (double v : x) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
}

TEST(Samplers, BlockSamplerExhausts) {
  BlockSampler s({0.1, 0.2, 0.3}, "fixed");
  std::vector<double> two(2);
  s.draw(two);
  EXPECT_EQ(two[1], 0.2);
  EXPECT_THROW(s.draw(two), Error);
}

TEST(Psi, HandValues) {
  EXPECT_DOUBLE_EQ(psi(one_dof_ball()), 3.0);
  const ImpactProblem frictionless = ImpactProblem::from_tangent(
      MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2).topRows(1),
      MatrixXd::Zero(1, 2), VectorXd::Constant(1, 1e-12));
  EXPECT_NEAR(psi(frictionless), 1.0 * 1.0 * (1.0 + 1e-12) + 1.0, 1e-12);
  const Example ex = build_example("phone");
  const double a = psi(ex.problem);
  const double b = psi(ex.problem.restricted_to({1, 0}));
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_GT(a, 1.0);
  EXPECT_NEAR(a, b, 1e-12 * a);
}

TEST(Approximate, BallCollapsesToRest) {
  ApproximateParams prm;
  prm.h = 1.0;
  prm.epsilon = 0.1;
  prm.n_traj_len = 5;
  prm.m_traj_count = 64;
  const PostImpactSet set = approximate(one_dof_ball(), VectorXd::Constant(1, -1.0), prm);
  ASSERT_EQ(set.samples.size(), 64u);
  for (const auto& s : set.samples) EXPECT_NEAR(s[0], 0.0, 1e-8);
  const OutcomeHistogram h = classify_outcomes(set.samples, one_dof_ball());
  EXPECT_EQ(h.per_contact[0][0], 64u);
}

TEST(Approximate, PhoneSetProperties) {
  const Example ex = build_example("phone");
  ApproximateParams prm;
  prm.h = 0.3;
  prm.epsilon = 0.03;
  prm.n_traj_len = 10;
  prm.m_traj_count = 1024;
  const PostImpactSet set = approximate(ex.problem, ex.v0, prm);
  ASSERT_FALSE(set.samples.empty());
  const double n0 = mass_norm(ex.problem, ex.v0);
  for (std::size_t k = 0; k < set.samples.size(); ++k) {
    const auto& s = set.samples[k];
    EXPECT_FALSE(is_impacting(ex.problem, s));
    EXPECT_LE(mass_norm(ex.problem, s), n0 * (1.0 + 1e-9));
    EXPECT_LE((s - set.pre_finish[k]).norm(), prm.epsilon / 3.0 + 1e-12);
  }
  OutcomeHistogram h = classify_outcomes(set.samples, ex.problem);
  EXPECT_GT(h.joint["A:stick,B:stick"], 0u);
  EXPECT_GT(h.joint["A:stick,B:lift"], 0u);
  EXPECT_GT(h.joint["A:lift,B:stick"], 0u);
}

TEST(Approximate, ThreadCountDoesNotChangeResult) {
  const Example ex = build_example("disk_stack");
  ApproximateParams prm;
  prm.h = 1.0;
  prm.epsilon = 0.1;
  prm.n_traj_len = 10;
  prm.m_traj_count = 200;
  prm.seed = 9;
  const PostImpactSet a = approximate(ex.problem, ex.v0, prm);
  prm.jobs = 4;
  const PostImpactSet b = approximate(ex.problem, ex.v0, prm);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) EXPECT_EQ(a.samples[k], b.samples[k]);
  prm.sampler = SamplerKind::kUniform;
  prm.m_traj_count = 1;
  const PostImpactSet c = approximate(ex.problem, ex.v0, prm);
  const PostImpactSet d = approximate(ex.problem, ex.v0, prm);
  ASSERT_EQ(c.samples.size(), 1u);
  EXPECT_EQ(c.samples[0], d.samples[0]);
}

TEST(Approximate, RejectsBadEpsilon) {
  ApproximateParams prm;
  prm.h = 0.3;
  prm.epsilon = 0.5;
  EXPECT_THROW(approximate(one_dof_ball(), VectorXd::Constant(1, -1.0), prm), Error);
}

TEST(Approximate, MirrorSymmetricScenes) {
  for (const char* name : {"phone", "disk_stack"}) {
    const Example ex = build_example(name);
    ApproximateParams prm;
    prm.h = ex.defaults.h;
    prm.epsilon = prm.h / 10.0;
    prm.n_traj_len = ex.defaults.n;
    prm.m_traj_count = 512;
    const PostImpactSet set = approximate(ex.problem, ex.v0, prm);
    const auto mirrored = reflect_samples(set.samples, reflect_map(name));
    // The set's own resolution: its worst gap against a larger independent set.
    ApproximateParams big = prm;
    big.m_traj_count = 4 * prm.m_traj_count;
    big.seed = 1000;
    const PostImpactSet ref = approximate(ex.problem, ex.v0, big);
    const double resolution = epsilon_net_check(set.samples, ref.samples, 1.0).worst_gap;
    const double mirror_gap = epsilon_net_check(set.samples, mirrored, 1.0).worst_gap;
    EXPECT_LE(mirror_gap, resolution) << name;
  }
}

TEST(NetCheck, Basics) {
  const std::vector<VectorXd> a{VectorXd::Zero(2), VectorXd::Ones(2)};
  NetCheck same = epsilon_net_check(a, a, 1e-12);
  EXPECT_TRUE(same.ok);
  EXPECT_EQ(same.worst_gap, 0.0);
  const double eps = 0.1;
  VectorXd far = VectorXd::Zero(2);
  far[0] = 2 * eps;
  const NetCheck miss = epsilon_net_check({VectorXd::Zero(2)}, {VectorXd::Zero(2), far}, eps);
  EXPECT_FALSE(miss.ok);
  EXPECT_DOUBLE_EQ(miss.worst_gap, 2 * eps);
}

TEST(NetCheck, GapShrinksAsSetGrows) {
  const Example ex = build_example("phone");
  ApproximateParams prm;
  prm.h = 0.3;
  prm.epsilon = 0.03;
  prm.n_traj_len = 10;
  prm.m_traj_count = 1u << 13;
  const PostImpactSet ref = approximate(ex.problem, ex.v0, prm);
  std::vector<double> gaps;
  for (std::size_t m = 1u << 7; m <= (1u << 11); m <<= 1) {
    prm.m_traj_count = m;
    gaps.push_back(epsilon_net_check(approximate(ex.problem, ex.v0, prm).samples,
                                     ref.samples, 1.0)
                       .worst_gap);
  }
  int increases = 0;
  for (std::size_t i = 1; i < gaps.size(); ++i) increases += gaps[i] > gaps[i - 1] + 1e-15;
  EXPECT_LE(increases, 1);
  EXPECT_LT(gaps.back(), gaps.front());
}

TEST(SampleBound, Values) {
  EXPECT_EQ(sample_count_bound(1, 1, 1, 0.5, 0.1), 5);
  EXPECT_EQ(sample_count_bound(1, 1, 1, 2.0, 0.1), 1);
  EXPECT_EQ(sample_count_bound(1, 1, 100, 1e-3, 0.1), kSampleBoundCap);
  // h=1, L=2, n=4, eps=0.1: Omega = 40^-4.
  const double omega = std::pow(40.0, -4.0);
  const auto expect = static_cast<std::int64_t>(
      std::ceil(std::log(0.01 * omega) / std::log1p(-omega)));
  EXPECT_EQ(sample_count_bound(1, 2, 4, 0.1, 0.01), expect);
  EXPECT_THROW(sample_count_bound(1, 1, 1, 0.5, 1.5), Error);
}

TEST(Lipschitz, EstimateIsFlaggedAndPositive) {
  const Example ex = build_example("phone");
  const LipschitzEstimate e = estimate_step_lipschitz(ex.problem, ex.v0, 0.3, 500, 1);
  EXPECT_FALSE(e.certified);
  EXPECT_EQ(e.pairs, 500u);
  EXPECT_GT(e.value, 0.0);
  EXPECT_TRUE(std::isfinite(e.value));
}

TEST(Compare, PhoneRows) {
  const Example ex = build_example("phone");
  ApproximateParams prm;
  prm.h = 0.3;
  prm.epsilon = 0.03;
  prm.n_traj_len = 10;
  prm.m_traj_count = 64;
  const Comparison c = compare_methods(ex.problem, ex.v0, prm);
  int anitescu = 0, sequential = 0;
  for (const auto& r : c.rows) {
    if (r.method == "anitescu") {
      ++anitescu;
      EXPECT_LE(r.v.norm(), 1e-8);
    } else if (r.method.rfind("sequential:", 0) == 0) {
      ++sequential;
      const VectorXd vn = ex.problem.jn() * r.v;
      EXPECT_EQ((vn.array() > 1e-6).count(), 1);
    }
  }
  EXPECT_EQ(anitescu, 1);
  EXPECT_EQ(sequential, 2);
  EXPECT_TRUE(c.capped_orders.empty());
}
