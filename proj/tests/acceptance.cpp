// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero when any criterion fails. Optional argv[1]: criterion number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "multimpact/contact_model.hpp"
#include "multimpact/error.hpp"
#include "multimpact/impact.hpp"
#include "multimpact/lcp.hpp"
#include "multimpact/oracles.hpp"
#include "multimpact/outcomes.hpp"
#include "multimpact/sampling.hpp"
#include "multimpact/scene.hpp"
#include "multimpact/set_approximation.hpp"

using namespace multimpact;
using Clock = std::chrono::steady_clock;
using Eigen::RowVectorXd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Shared randomized step campaign for criteria 1, 2 (first half), 3 and 9.

struct Campaign {
  std::size_t calls = 0, solved = 0;
  std::size_t dissipation_violations = 0;
  std::size_t residual_violations = 0;
  std::size_t activation_violations = 0;
  std::size_t certificate_violations = 0;
  std::size_t errors = 0;
  double worst_residual_ratio = 0.0;
  double worst_certificate_gap = 0.0;
  bool r_ok = true;
  std::string r_error;
  double seconds = 0.0;
};

const Campaign& campaign() {
  static const Campaign result = [] {
    Campaign c;
    const auto t0 = Clock::now();
    constexpr std::size_t kCalls = 10000;
    for (const auto& name : builtin_names()) {
      const Example ex = build_example(name);
      const ImpactProblem& p = ex.problem;
      const int m = p.num_contacts();
      const int nv = p.num_velocities();
      VectorXd r;
      try {
        r = compute_r(p);
      } catch (const Error& e) {
        c.r_ok = false;
        c.r_error = name + ": " + e.what();
      }
      std::mt19937_64 rng(derive_seed(2024, std::hash<std::string>{}(name)));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double vscale = std::max(1e-3, ex.v0.norm());
      const double h = ex.defaults.h;
      for (std::size_t k = 0; k < kCalls; ++k) {
        VectorXd v(nv);
        const double a = 1.5 * unit(rng);
        const double b = 0.6 * unit(rng);
        for (int i = 0; i < nv; ++i) v[i] = a * ex.v0[i] + b * vscale * gauss(rng);
        VectorXd lam(m);
        for (int i = 0; i < m; ++i) {
          lam[i] = unit(rng) < 0.05 ? 0.0 : h * unit(rng);
        }
        ++c.calls;
        AssembledLcp lcp;
        LcpSolution sol;
        StepRecord s;
        try {
          s = sim_step(p, v, lam, StepOptions{}, &lcp, &sol);
        } catch (const Error&) {
          ++c.errors;
          continue;
        }
        const double n0 = mass_norm(p, s.v_before);
        const double n1 = mass_norm(p, s.v_after);
        if (n1 > n0 * (1.0 + 1e-9)) ++c.dissipation_violations;
        if (!s.solver_invoked) continue;
        ++c.solved;

        const double res = residuals(lcp.lcp, sol.z).max();
        const double bound = 1e-9 * (1.0 + lcp.lcp.q.norm());
        c.worst_residual_ratio = std::max(c.worst_residual_ratio, res / bound);
        if (res > bound) ++c.residual_violations;

        const VectorXd vn = p.jn() * s.v_after;
        bool some_full = false;
        for (int i = 0; i < m; ++i) {
          if (s.lambda_n[i] >= lam[i] - 1e-8) some_full = true;
        }
        if (!some_full && vn.minCoeff() < -1e-8) ++c.activation_violations;

        if (r.size() == nv) {
          const double lhs = r.dot(s.v_after - s.v_before);
          const double gap = s.lambda_n.lpNorm<1>() - lhs;
          c.worst_certificate_gap = std::max(c.worst_certificate_gap, gap);
          if (lhs < s.lambda_n.lpNorm<1>() - 1e-8) ++c.certificate_violations;
        }
      }
    }
    c.seconds = seconds_since(t0);
    return c;
  }();
  return result;
}

Outcome criterion1() {
  const Campaign& c = campaign();
  Outcome o;
  o.pass = c.dissipation_violations == 0 && c.errors == 0 && c.seconds < 30.0;
  o.detail = std::to_string(c.calls) + " steps (" + std::to_string(c.solved) +
             " solved), violations=" + std::to_string(c.dissipation_violations) +
             ", step errors=" + std::to_string(c.errors) + ", " + num(c.seconds) + " s";
  return o;
}

// Random single-contact problem in the plane, approaching at v.
struct RandomSingle {
  ImpactProblem p;
  VectorXd v, lam;
};

RandomSingle random_single(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    MatrixXd a(3, 3);
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = gauss(rng);
    const MatrixXd mass = a * a.transpose() + 0.3 * MatrixXd::Identity(3, 3);
    MatrixXd jn(1, 3), jt(1, 3);
    for (int i = 0; i < 3; ++i) {
      jn(0, i) = gauss(rng);
      jt(0, i) = gauss(rng);
    }
    VectorXd mu(1);
    mu[0] = 0.2 + 1.3 * unit(rng);
    VectorXd v(3);
    for (int i = 0; i < 3; ++i) v[i] = gauss(rng);
    const double vn = (jn * v)(0);
    if (vn > -0.05) v -= (vn + 0.1 + unit(rng)) / jn.squaredNorm() * jn.row(0).transpose();
    RandomSingle out{ImpactProblem::from_tangent(mass, jn, jt, mu), v, VectorXd(1)};
    out.lam[0] = 0.05 + 2.0 * unit(rng);
    if (is_impacting(out.p, v)) return out;
  }
}

VectorXd velocity_from(const ImpactProblem& p, const VectorXd& v, const VectorXd& ln,
                       const VectorXd& beta) {
  VectorXd imp(ln.size() + beta.size());
  imp << ln, beta;
  return v + p.minv_jbar_t() * imp;
}

Outcome criterion2() {
  const Campaign& c = campaign();
  std::mt19937_64 rng(99);
  std::size_t step_miss = 0, anitescu_miss = 0, tried = 0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const RandomSingle rs = random_single(rng);
    const ImpactProblem& p = rs.p;
    AssembledLcp lcp;
    LcpSolution sol;
    const StepRecord s = sim_step(p, rs.v, rs.lam, StepOptions{}, &lcp, &sol);
    ++tried;
    {
      const auto all = brute_force_lcp(lcp.lcp);
      const auto& L = lcp.layout;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& b : all) {
        const VectorXd vb = velocity_from(p, rs.v, b.z.segment(L.lambda_n.begin, 1),
                                          b.z.segment(L.beta.begin, 2));
        best = std::min(best, (vb - s.v_after).norm());
      }
      worst = std::max(worst, best);
      if (!(best <= 1e-8)) ++step_miss;
    }
    {
      // Resolve-to-rest instance: drop the force-cap block.
      const auto& L = lcp.layout;
      const int n = L.size - L.gamma_f.size;
      LcpInstance an{lcp.lcp.M.bottomRightCorner(n, n), lcp.lcp.q.tail(n)};
      const LcpSolution z = lemke_solve(an);
      const VectorXd vz = velocity_from(p, rs.v, z.z.segment(0, 1), z.z.segment(1, 2));
      const auto all = brute_force_lcp(an);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& b : all) {
        const VectorXd vb = velocity_from(p, rs.v, b.z.segment(0, 1), b.z.segment(1, 2));
        best = std::min(best, (vb - vz).norm());
      }
      worst = std::max(worst, best);
      if (z.status != LcpStatus::kSolved || !(best <= 1e-8)) ++anitescu_miss;
    }
  }
  Outcome o;
  o.pass = c.residual_violations == 0 && c.solved > 0 && step_miss == 0 &&
           anitescu_miss == 0;
  o.detail = "residual violations " + std::to_string(c.residual_violations) + "/" +
             std::to_string(c.solved) + " (worst ratio " + num(c.worst_residual_ratio) +
             "); brute-force misses step=" + std::to_string(step_miss) +
             " rest=" + std::to_string(anitescu_miss) + " of " + std::to_string(tried) +
             " (worst " + num(worst) + ")";
  return o;
}

Outcome criterion3() {
  const Campaign& c = campaign();
  Outcome o;
  o.pass = c.activation_violations == 0 && c.solved > 0;
  o.detail = std::to_string(c.activation_violations) + " violations over " +
             std::to_string(c.solved) + " solved steps";
  return o;
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  Outcome o;
  double worst = 0.0;
  for (const char* name : {"phone", "box_wall"}) {
    const Example ex = build_example(name);
    const AnitescuResult r = anitescu_resolve(ex.problem, ex.v0);
    worst = std::max(worst, r.v_plus.lpNorm<Eigen::Infinity>());
  }
  const double t = seconds_since(t0);
  o.pass = worst <= 1e-8 && t < 1.0;
  o.detail = "max |v+|_inf = " + num(worst) + ", " + num(t) + " s";
  return o;
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  Outcome o;
  std::ostringstream d;
  bool ok = true;
  {
    const Example ex = build_example("phone");
    const ImpactProblem& p = ex.problem;
    const int a = p.contact_index("A"), b = p.contact_index("B");
    const VectorXd va = sequential_resolve(p, ex.v0, {a}).final_velocity();
    const VectorXd vb = sequential_resolve(p, ex.v0, {b}).final_velocity();
    auto lifts = [&](const VectorXd& v) {
      const VectorXd vn = p.jn() * v;
      int n = 0;
      for (int i = 0; i < vn.size(); ++i) n += vn[i] > 1e-6;
      return n;
    };
    const double mirror = (reflect_map("phone") * va - vb).norm();
    const bool one_each = lifts(va) == 1 && lifts(vb) == 1;
    ok = ok && one_each && mirror <= 1e-6 * (1.0 + va.norm());
    d << "phone lifts A-first=" << lifts(va) << " B-first=" << lifts(vb)
      << " mirror gap=" << num(mirror);
  }
  {
    const Example ex = build_example("box_wall");
    const ImpactProblem& p = ex.problem;
    const int a = p.contact_index("A"), b = p.contact_index("B");
    const VectorXd v = sequential_resolve(p, ex.v0, {b}).final_velocity();
    const double vn_b = (p.jn().row(b) * v)(0);
    const double vt_a = (p.jt().row(a) * v)(0);
    ok = ok && vn_b > 1e-6 && vt_a < -1e-6;
    d << "; box_wall vn_B=" << num(vn_b) << " vt_A=" << num(vt_a);
  }
  const double t = seconds_since(t0);
  o.pass = ok && t < 1.0;
  d << ", " << num(t) << " s";
  o.detail = d.str();
  return o;
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  const Example ex = build_example("phone");
  const ImpactProblem& p = ex.problem;
  ApproximateParams prm;
  prm.h = 0.3;
  prm.epsilon = prm.h / 10.0;
  prm.n_traj_len = 10;
  prm.m_traj_count = 1u << 12;
  prm.jobs = 1;
  const PostImpactSet set = approximate(p, ex.v0, prm);
  const OutcomeHistogram hist = classify_outcomes(set.samples, p);
  auto count = [&](const std::string& key) {
    const auto it = hist.joint.find(key);
    return it == hist.joint.end() ? std::size_t{0} : it->second;
  };
  const std::size_t both = count("A:stick,B:stick");
  const std::size_t a_stick = count("A:stick,B:lift");
  const std::size_t b_stick = count("A:lift,B:stick");

  const double tol = 0.1 * mass_norm(p, ex.v0);
  std::vector<VectorXd> points{anitescu_resolve(p, ex.v0).v_plus,
                               sequential_resolve(p, ex.v0, {0}).final_velocity(),
                               sequential_resolve(p, ex.v0, {1}).final_velocity()};
  double worst = 0.0;
  for (const auto& x : points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : set.samples) best = std::min(best, mass_norm(p, s - x));
    worst = std::max(worst, best);
  }
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = both > 0 && a_stick > 0 && b_stick > 0 && worst <= tol && t < 120.0;
  o.detail = "classes both-stick=" + std::to_string(both) +
             " A-stick/B-lift=" + std::to_string(a_stick) +
             " B-stick/A-lift=" + std::to_string(b_stick) + " of " +
             std::to_string(set.samples.size()) + "; worst baseline distance " +
             num(worst) + " (tol " + num(tol) + "), " + num(t) + " s";
  return o;
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  const Example ex = build_example("phone");
  const ImpactProblem& p = ex.problem;
  const double h = 0.3;
  const TerminationConstant tc = termination_constant(p, h);
  const double base = static_cast<double>(tc.c) * std::ceil(mass_norm(p, ex.v0));
  constexpr int kRuns = 10000;
  std::size_t unterminated = 0;
  std::vector<std::size_t> z(kRuns);
  for (int j = 0; j < kRuns; ++j) {
    UniformSampler s(derive_seed(7, j));
    const Trajectory t = sim(p, ex.v0, h, 1000000, s, StepOptions{}, j);
    if (!t.terminated) ++unterminated;
    z[j] = t.steps.size();
  }
  std::ostringstream d;
  bool ok = unterminated == 0;
  d << "c=" << tc.c << " unterminated=" << unterminated;
  for (int k : {4, 9, 16}) {
    std::size_t over = 0;
    for (auto zz : z) over += static_cast<double>(zz) > base + k;
    const double freq = static_cast<double>(over) / kRuns;
    const double bound = std::exp(-k / std::pow(p.num_contacts() + 1.0, 2)) + 0.01;
    ok = ok && freq <= bound;
    d << "; k=" << k << " freq=" << num(freq) << " bound=" << num(bound);
  }
  const double t = seconds_since(t0);
  d << ", " << num(t) << " s";
  Outcome o;
  o.pass = ok && t < 120.0;
  o.detail = d.str();
  return o;
}

// Random heavy single-contact problem whose reference trajectory reverses
// slip before separating. Heavy so that h-steps are small against the
// impulse needed to stop the contact.
struct ConvergenceCase {
  ImpactProblem p;
  VectorXd v0;
  DenseTrajectory ref;
  int draws = 0;
};

bool reverses_slip(const ImpactProblem& p, const DenseTrajectory& d) {
  const RowVectorXd jt = p.jt().row(0);
  const double first = jt.dot(d.v_grid.front());
  const double scale = 1e-3 * std::abs(first);
  for (const auto& v : d.v_grid) {
    if (first * jt.dot(v) < 0.0 && std::abs(jt.dot(v)) > scale) return true;
  }
  return false;
}

ConvergenceCase convergence_case() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ConvergenceCase c;
  for (;;) {
    ++c.draws;
    const double mass = 50.0 + 100.0 * unit(rng);
    const double inertia = mass * (0.02 + 0.1 * unit(rng));
    const double rx = 0.5 + unit(rng), ry = -(0.2 + unit(rng));
    MatrixXd m = MatrixXd::Zero(3, 3);
    m.diagonal() << mass, mass, inertia;
    MatrixXd jn(1, 3), jt(1, 3);
    jn << 0.0, 1.0, rx;
    jt << 1.0, 0.0, -ry;
    ImpactProblem p = ImpactProblem::from_tangent(m, jn, jt, VectorXd::Ones(1));
    VectorXd v0(3);
    v0 << -unit(rng), -(0.5 + unit(rng)), 0.0;
    if (!is_impacting(p, v0)) continue;
    DenseTrajectory ref = routh_dense_reference(p, v0, 1e-6 * mass_norm(p, v0));
    if (!reverses_slip(p, ref)) continue;
    c.p = std::move(p);
    c.v0 = v0;
    c.ref = std::move(ref);
    return c;
  }
}

Outcome criterion8() {
  const auto t0 = Clock::now();
  const ConvergenceCase cc = convergence_case();
  const ImpactProblem& p = cc.p;
  const VectorXd& v0 = cc.v0;
  const double vnorm = mass_norm(p, v0);
  const VectorXd vref = cc.ref.v_grid.back();
  const double op = p.minv_jbar_t().operatorNorm();
  std::vector<double> errs;
  std::ostringstream d;
  d << "draw " << cc.draws << "; ";
  bool ok = true;
  for (double f : {0.1, 0.05, 0.025}) {
    const double h = f * vnorm;
    VectorXd mean = VectorXd::Zero(3);
    for (int s = 0; s < 64; ++s) {
      UniformSampler smp(derive_seed(11, s));
      const Trajectory t = sim(p, v0, h, 1000000, smp, StepOptions{}, s);
      if (!t.terminated) ok = false;
      mean += t.final_velocity();
    }
    mean /= 64.0;
    const double e = (mean - vref).norm();
    errs.push_back(e);
    ok = ok && e <= 5.0 * h * op;
    d << "h=" << num(h) << " err=" << num(e) << " (bound " << num(5.0 * h * op) << "); ";
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double ratio = errs[i] / errs[i - 1];
    ok = ok && ratio >= 0.35 && ratio <= 0.7;
    d << "ratio " << num(ratio) << "; ";
  }
  const double t = seconds_since(t0);
  d << num(t) << " s";
  Outcome o;
  o.pass = ok && t < 60.0;
  o.detail = d.str();
  return o;
}

Outcome criterion9() {
  const Campaign& c = campaign();
  bool jam = false;
  try {
    compute_r(jamming_problem());
  } catch (const Error& e) {
    jam = e.code() == ErrorCode::kNonDegeneracyViolation;
  }
  Outcome o;
  o.pass = c.r_ok && c.certificate_violations == 0 && c.solved > 0 && jam;
  o.detail = (c.r_ok ? std::string("r computed for all examples") : "r failed: " + c.r_error) +
             "; violations " + std::to_string(c.certificate_violations) +
             " (worst gap " + num(c.worst_certificate_gap) + "); jamming " +
             (jam ? "rejected" : "NOT rejected");
  return o;
}

// Written from the formula directly, in extended precision.
std::int64_t reference_bound(double h, double l, std::int64_t n, double eps, double delta) {
  const long double cells = std::ceil(static_cast<long double>(h) * l *
                                      std::sqrt(static_cast<long double>(n)) / eps);
  if (cells <= 1.0L) return 1;
  const long double omega = std::pow(cells, -static_cast<long double>(n));
  const long double m = std::log(static_cast<long double>(delta) * omega) /
                        std::log1p(-omega);
  if (!(m < 9.2e18L)) return std::numeric_limits<std::int64_t>::max();
  auto k = static_cast<std::int64_t>(std::ceil(m));
  return k < 1 ? 1 : k;
}

Outcome criterion10() {
  const std::int64_t five = sample_count_bound(1, 1, 1, 0.5, 0.1);
  std::size_t mismatches = 0, points = 0;
  const double hs[] = {0.3, 1.0, 2.5, 7.0};
  const double ls[] = {0.8, 1.7, 3.0};
  const std::int64_t ns[] = {1, 2, 4};
  const double es[] = {0.07, 0.45, 1.3};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(0.001, 0.5);
  std::string first_bad;
  for (double h : hs) {
    for (double l : ls) {
      for (auto n : ns) {
        for (double e : es) {
          if (points == 100) break;
          const double delta = ud(rng);
          const auto a = sample_count_bound(h, l, n, e, delta);
          const auto b = reference_bound(h, l, n, e, delta);
          ++points;
          if (a != b) {
            ++mismatches;
            if (first_bad.empty()) {
              first_bad = " first: " + std::to_string(a) + " vs " + std::to_string(b);
            }
          }
        }
      }
    }
  }
  while (points < 100) {
    const double delta = ud(rng);
    const double h = 0.5 + ud(rng) * 4;
    const auto a = sample_count_bound(h, 2.0, 4, 0.1, delta);
    const auto b = reference_bound(h, 2.0, 4, 0.1, delta);
    ++points;
    mismatches += a != b;
  }
  Outcome o;
  o.pass = five == 5 && mismatches == 0;
  o.detail = "bound(1,1,1,0.5,0.1)=" + std::to_string(five) + "; " +
             std::to_string(mismatches) + " mismatches over " + std::to_string(points) +
             " grid points" + first_bad;
  return o;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion11() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "multimpact_acceptance";
  fs::create_directories(dir);
  const std::string cli = MULTIMPACT_CLI_PATH;
  auto run = [&](const std::string& args, const fs::path& out) {
    const std::string cmd = "\"" + cli + "\" approximate --scene disk_stack --m 256 --seed 3 " +
                            args + " --output \"" + out.string() + "\" > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const fs::path a = dir / "a.csv", b = dir / "b.csv", c = dir / "c.csv", d = dir / "d.csv";
  const int ra = run("--jobs 1", a), rb = run("--jobs 1", b);
  const int rc = run("--jobs 8", c), rd = run("--jobs 8", d);
  const std::string sa = slurp(a);
  const bool same = !sa.empty() && sa == slurp(b) && sa == slurp(c) && sa == slurp(d);
  Outcome o;
  o.pass = ra == 0 && rb == 0 && rc == 0 && rd == 0 && same;
  o.detail = "exit codes " + std::to_string(ra) + "," + std::to_string(rb) + "," +
             std::to_string(rc) + "," + std::to_string(rd) + "; " +
             std::to_string(sa.size()) + " bytes, outputs " +
             (same ? "identical" : "DIFFER");
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"dissipation", criterion1},
      {"LCP certification", criterion2},
      {"full activation", criterion3},
      {"resolve-to-rest recovery", criterion4},
      {"sequential outcomes", criterion5},
      {"set-valued coverage", criterion6},
      {"termination tail", criterion7},
      {"single-contact convergence", criterion8},
      {"r-certificate", criterion9},
      {"sample bound arithmetic", criterion10},
      {"determinism", criterion11},
  };
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "criterion " << (i + 1) << " ("
              << criteria[i].first << "): " << o.detail << std::endl;
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
