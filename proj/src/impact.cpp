#include "multimpact/impact.hpp"

#include <algorithm>
#include <cmath>

#include "multimpact/error.hpp"

namespace multimpact {

namespace {

MatrixXd ones_blocks(int m) {
  MatrixXd E = MatrixXd::Zero(2 * m, m);
  for (int i = 0; i < m; ++i) E(2 * i, i) = E(2 * i + 1, i) = 1.0;
  return E;
}

void check_velocity(const ImpactProblem& p, const VelocityState& v) {
  require(v.size() == p.num_velocities(), ErrorCode::kDimensionMismatch,
          "velocity length differs from problem size");
  require(v.allFinite(), ErrorCode::kInvalidArgument, "velocity is not finite");
}

void require_solved(const LcpSolution& sol, const LcpInstance& lcp,
                    const char* what) {
  if (sol.status != LcpStatus::kSolved) {
    fail(ErrorCode::kSolverFailure,
         std::string(what) + ": Lemke stopped with " + lcp_status_name(sol.status) +
             " after " + std::to_string(sol.pivot_count) + " pivots");
  }
  const double scale = 1.0 + lcp.q.norm();
  const LcpResiduals r = residuals(lcp, sol.z);
  if (r.max() > 1e-6 * scale * (1.0 + sol.z.norm())) {
    fail(ErrorCode::kSolverFailure,
         std::string(what) + ": LCP residual " + std::to_string(r.max()) +
             " too large");
  }
}

StepRecord zero_step(const ImpactProblem& p, const VelocityState& v,
                     const VectorXd& lambda_max) {
  StepRecord rec;
  const int m = p.num_contacts();
  rec.lambda_max = lambda_max;
  rec.lambda_n = VectorXd::Zero(m);
  rec.beta = VectorXd::Zero(2 * m);
  rec.v_before = v;
  rec.v_after = v;
  rec.energy_before = rec.energy_after = kinetic_energy(p, v);
  return rec;
}

}  // namespace

AssembledLcp assemble_impact_lcp(const ImpactProblem& p, const VelocityState& v,
                                 const VectorXd& lambda_max) {
  check_velocity(p, v);
  const int m = p.num_contacts();
  require(lambda_max.size() == m, ErrorCode::kDimensionMismatch,
          "lambda_max length differs from contact count");
  require(lambda_max.allFinite() && (m == 0 || lambda_max.minCoeff() >= 0.0),
          ErrorCode::kInvalidArgument, "lambda_max must be finite and nonnegative");

  AssembledLcp out;
  auto& L = out.layout;
  L.gamma_f = {0, m};
  L.lambda_n = {m, m};
  L.beta = {2 * m, 2 * m};
  L.gamma_v = {4 * m, m};
  L.size = 5 * m;

  const MatrixXd& D = p.delassus();
  MatrixXd M = MatrixXd::Zero(L.size, L.size);
  M.block(L.gamma_f.begin, L.lambda_n.begin, m, m) = -MatrixXd::Identity(m, m);
  M.block(L.lambda_n.begin, L.gamma_f.begin, m, m) = MatrixXd::Identity(m, m);
  M.block(L.lambda_n.begin, L.lambda_n.begin, 3 * m, 3 * m) = D;
  M.block(L.beta.begin, L.gamma_v.begin, 2 * m, m) = ones_blocks(m);
  M.block(L.gamma_v.begin, L.lambda_n.begin, m, m) = p.mu().asDiagonal();
  M.block(L.gamma_v.begin, L.beta.begin, m, 2 * m) = -ones_blocks(m).transpose();

  VectorXd q = VectorXd::Zero(L.size);
  q.segment(L.gamma_f.begin, m) = lambda_max;
  q.segment(L.lambda_n.begin, m) = p.jn() * v;
  q.segment(L.beta.begin, 2 * m) = p.jd() * v;

  out.lcp.M = std::move(M);
  out.lcp.q = std::move(q);
  return out;
}

StepRecord sim_step(const ImpactProblem& p, const VelocityState& v,
                    const VectorXd& lambda_max, const StepOptions& opts) {
  return sim_step(p, v, lambda_max, opts, nullptr, nullptr);
}

StepRecord sim_step(const ImpactProblem& p, const VelocityState& v,
                    const VectorXd& lambda_max, const StepOptions& opts,
                    AssembledLcp* lcp_out, LcpSolution* sol_out) {
  check_velocity(p, v);
  require(lambda_max.size() == p.num_contacts(), ErrorCode::kDimensionMismatch,
          "lambda_max length differs from contact count");
  require(lambda_max.allFinite() &&
              (lambda_max.size() == 0 || lambda_max.minCoeff() >= 0.0),
          ErrorCode::kInvalidArgument, "lambda_max must be finite and nonnegative");
  if (!is_impacting(p, v, opts.impact_tol) || lambda_max.isZero(0.0)) {
    return zero_step(p, v, lambda_max);
  }

  AssembledLcp a = assemble_impact_lcp(p, v, lambda_max);
  LcpSolution sol = lemke_solve(a.lcp, opts.lemke);
  require_solved(sol, a.lcp, "impact step");

  const int m = p.num_contacts();
  StepRecord rec;
  rec.lambda_max = lambda_max;
  rec.lambda_n = sol.z.segment(a.layout.lambda_n.begin, m);
  rec.beta = sol.z.segment(a.layout.beta.begin, 2 * m);
  rec.v_before = v;
  rec.v_after = v + p.minv_jbar_t() * sol.z.segment(a.layout.lambda_n.begin, 3 * m);
  rec.energy_before = kinetic_energy(p, v);
  rec.energy_after = kinetic_energy(p, rec.v_after);
  rec.pivots = sol.pivot_count;
  rec.solver_invoked = true;

  if (!in_linear_cone(p, rec.v_after, rec.lambda_n, rec.beta, opts.cone_tol)) {
    fail(ErrorCode::kConeViolation,
         "impact step force left the linearized friction cone");
  }
  if (lcp_out) *lcp_out = std::move(a);
  if (sol_out) *sol_out = std::move(sol);
  return rec;
}

Trajectory sim(const ImpactProblem& p, const VelocityState& v0, double h,
               std::size_t n_max, ImpulseSampler& sampler,
               const StepOptions& opts, std::uint64_t rng_seed) {
  check_velocity(p, v0);
  require(h > 0.0 && std::isfinite(h), ErrorCode::kInvalidArgument,
          "h must be positive and finite");
  require(n_max >= 1, ErrorCode::kInvalidArgument, "n_max must be >= 1");
  Trajectory traj;
  traj.rng_seed = rng_seed;
  traj.h = h;
  traj.sampler = sampler.kind();
  traj.v0 = v0;

  const int m = p.num_contacts();
  VectorXd draw(m);
  VelocityState v = v0;
  while (is_impacting(p, v, opts.impact_tol) && traj.steps.size() < n_max) {
    sampler.draw(std::span<double>(draw.data(), m));
    StepRecord rec = sim_step(p, v, h * draw, opts);
    v = rec.v_after;
    traj.steps.push_back(std::move(rec));
  }
  traj.terminated = !is_impacting(p, v, opts.impact_tol);
  return traj;
}

AnitescuResult anitescu_resolve(const ImpactProblem& p, const VelocityState& v,
                                const StepOptions& opts) {
  check_velocity(p, v);
  const int m = p.num_contacts();
  const int n = 4 * m;
  MatrixXd M = MatrixXd::Zero(n, n);
  M.topLeftCorner(3 * m, 3 * m) = p.delassus();
  M.block(m, 3 * m, 2 * m, m) = ones_blocks(m);
  M.block(3 * m, 0, m, m) = p.mu().asDiagonal();
  M.block(3 * m, m, m, 2 * m) = -ones_blocks(m).transpose();
  VectorXd q = VectorXd::Zero(n);
  q.head(3 * m) = p.jbar() * v;

  LcpInstance lcp{std::move(M), std::move(q)};
  LcpSolution sol = lemke_solve(lcp, opts.lemke);
  require_solved(sol, lcp, "simultaneous impact");

  AnitescuResult out;
  out.lambda_n = sol.z.head(m);
  out.beta = sol.z.segment(m, 2 * m);
  out.v_plus = v + p.minv_jbar_t() * sol.z.head(3 * m);
  out.pivots = sol.pivot_count;
  return out;
}

Trajectory sequential_resolve(const ImpactProblem& p, const VelocityState& v,
                              const std::vector<int>& order,
                              std::size_t iteration_cap,
                              const StepOptions& opts) {
  check_velocity(p, v);
  const int m = p.num_contacts();
  require(!order.empty(), ErrorCode::kInvalidArgument,
          "sequential order must be nonempty");
  std::vector<int> full;
  for (int c : order) {
    require(c >= 0 && c < m, ErrorCode::kInvalidArgument,
            "sequential order names an unknown contact");
    if (std::find(full.begin(), full.end(), c) == full.end()) full.push_back(c);
  }
  for (int c = 0; c < m; ++c) {
    if (std::find(full.begin(), full.end(), c) == full.end()) full.push_back(c);
  }

  Trajectory traj;
  traj.sampler = "sequential";
  traj.h = INFINITY;
  traj.v0 = v;
  VelocityState cur = v;
  std::size_t pos = 0;
  while (is_impacting(p, cur, opts.impact_tol)) {
    if (traj.steps.size() >= iteration_cap) {
      fail(ErrorCode::kIterationCap,
           "sequential resolution did not finish within " +
               std::to_string(iteration_cap) + " single impacts");
    }
    const VectorXd vn = p.jn() * cur;
    const double thresh = -opts.impact_tol * (1.0 + cur.norm());
    int pick = -1;
    for (std::size_t k = 0; k < full.size(); ++k) {
      const std::size_t idx = (pos + k) % full.size();
      if (vn[full[idx]] < thresh) {
        pick = full[idx];
        pos = idx + 1;
        break;
      }
    }
    const ImpactProblem single = p.restricted_to({pick});
    const AnitescuResult res = anitescu_resolve(single, cur, opts);
    StepRecord rec;
    rec.lambda_max = VectorXd::Zero(m);
    rec.lambda_max[pick] = INFINITY;
    rec.lambda_n = VectorXd::Zero(m);
    rec.lambda_n[pick] = res.lambda_n[0];
    rec.beta = VectorXd::Zero(2 * m);
    rec.beta.segment(2 * pick, 2) = res.beta;
    rec.v_before = cur;
    rec.v_after = res.v_plus;
    rec.energy_before = kinetic_energy(p, cur);
    rec.energy_after = kinetic_energy(p, res.v_plus);
    rec.pivots = res.pivots;
    rec.solver_invoked = true;
    cur = res.v_plus;
    traj.steps.push_back(std::move(rec));
  }
  traj.terminated = true;
  return traj;
}

VectorXd compute_r(const ImpactProblem& p, const LemkeOptions& opts) {
  const int m = p.num_contacts();
  const int nv = p.num_velocities();
  require(m >= 1, ErrorCode::kInvalidArgument, "compute_r needs a contact");
  // Rows of G are (M^-1 F)' for F = Jn' + mu d Jt', d = +1, -1.
  MatrixXd F(nv, 2 * m);
  const MatrixXd jt = p.jt();
  for (int i = 0; i < m; ++i) {
    F.col(2 * i) = (p.jn().row(i) + p.mu()[i] * jt.row(i)).transpose();
    F.col(2 * i + 1) = (p.jn().row(i) - p.mu()[i] * jt.row(i)).transpose();
  }
  const MatrixXd G = p.solve_mass(F).transpose();
  const int k = 2 * m;
  const int nx = 2 * nv;
  MatrixXd A(k, nx);
  A << G, -G;

  // KKT conditions of min 1'x s.t. Ax >= 1, x >= 0.
  LcpInstance lcp;
  lcp.M = MatrixXd::Zero(nx + k, nx + k);
  lcp.M.topRightCorner(nx, k) = -A.transpose();
  lcp.M.bottomLeftCorner(k, nx) = A;
  lcp.q.resize(nx + k);
  lcp.q.head(nx).setOnes();
  lcp.q.tail(k).setConstant(-1.0);

  const LcpSolution sol = lemke_solve(lcp, opts);
  if (sol.status == LcpStatus::kRayTermination) {
    fail(ErrorCode::kNonDegeneracyViolation,
         "no r certificate exists: some nonzero cone force produces no "
         "generalized impulse");
  }
  require_solved(sol, lcp, "r certificate");
  const VectorXd r = sol.z.head(nv) - sol.z.segment(nv, nv);
  if ((G * r).minCoeff() < 1.0 - 1e-8) {
    fail(ErrorCode::kSolverFailure, "r certificate LP returned an infeasible point");
  }
  return r;
}

double TerminationConstant::tail_bound(double k) const {
  const double d = contacts + 1.0;
  return std::exp(-k / (d * d));
}

TerminationConstant termination_constant(const ImpactProblem& p, double h) {
  require(h > 0.0 && std::isfinite(h), ErrorCode::kInvalidArgument,
          "h must be positive and finite");
  TerminationConstant tc;
  tc.r = compute_r(p);
  tc.contacts = p.num_contacts();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(p.mass(), Eigen::EigenvaluesOnly);
  const double sigma_min = eig.eigenvalues().minCoeff();
  const double x = (tc.contacts + 1.0) * tc.r.norm() / (h * std::sqrt(sigma_min));
  tc.c = 4 * static_cast<long long>(std::ceil(x - 1e-12 * x));
  return tc;
}

}  // namespace multimpact
