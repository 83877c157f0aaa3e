#include "multimpact/oracles.hpp"

#include <cmath>

#include "multimpact/error.hpp"

namespace multimpact {

DenseTrajectory routh_dense_reference(const ImpactProblem& p,
                                      const VelocityState& v0, double ds,
                                      const RouthOptions& opts) {
  require(p.num_contacts() == 1, ErrorCode::kInvalidArgument,
          "dense reference needs exactly one contact");
  require(v0.size() == p.num_velocities(), ErrorCode::kDimensionMismatch,
          "v0 length differs from problem size");
  require(ds > 0.0 && std::isfinite(ds), ErrorCode::kInvalidArgument,
          "ds must be positive");

  const VectorXd jn = p.jn().row(0).transpose();
  const VectorXd jt = p.jt().row(0).transpose();
  const double mu = p.mu()[0];
  const VectorXd minv_jn = p.solve_mass(jn);
  const VectorXd minv_jt = p.solve_mass(jt);
  const double a_nn = jn.dot(minv_jn);
  const double a_tn = jt.dot(minv_jn);
  const double a_tt = jt.dot(minv_jt);
  const double band = opts.slip_tol_rel * v0.norm();

  DenseTrajectory out;
  double s = 0.0;
  VelocityState v = v0;
  out.s_grid.push_back(s);
  out.v_grid.push_back(v);
  double un = jn.dot(v);
  if (un >= 0.0) return out;
  const double budget = opts.budget_factor * (-un / a_nn) + 10.0 * ds;

  while (true) {
    un = jn.dot(v);
    const double ut = jt.dot(v);
    VectorXd dir;
    bool sliding = false;
    if (a_tt <= 0.0) {
      dir = minv_jn;
    } else if (std::abs(ut) <= band) {
      const double f = -a_tn / a_tt;
      if (std::abs(f) <= mu) {
        dir = minv_jn + f * minv_jt;
      } else {
        dir = minv_jn - mu * std::copysign(1.0, a_tn) * minv_jt;
      }
    } else {
      sliding = true;
      dir = minv_jn - mu * std::copysign(1.0, ut) * minv_jt;
    }
    const double rn = jn.dot(dir);
    const double rt = jt.dot(dir);

    double step = ds;
    bool done = false;
    if (sliding && rt * ut < 0.0) step = std::min(step, -ut / rt);
    if (rn > 0.0 && -un / rn <= step) {
      step = -un / rn;
      done = true;
    }
    v += step * dir;
    s += step;
    out.s_grid.push_back(s);
    out.v_grid.push_back(v);
    if (done) break;
    if (s > budget) {
      fail(ErrorCode::kBudgetExceeded,
           "dense reference did not separate within its impulse budget");
    }
  }
  return out;
}

std::vector<LcpSolution> brute_force_lcp(const LcpInstance& lcp, double dedup_tol,
                                         double feas_tol) {
  lcp.validate();
  const Eigen::Index n = lcp.size();
  require(n <= 14, ErrorCode::kInvalidArgument,
          "brute-force enumeration is limited to n <= 14");
  const double tol = feas_tol * (1.0 + lcp.q.norm());
  std::vector<LcpSolution> out;
  const std::uint32_t count = 1u << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    std::vector<Eigen::Index> S;
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) S.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(S.size());
    VectorXd z = VectorXd::Zero(n);
    if (k > 0) {
      MatrixXd A(k, k);
      VectorXd b(k);
      for (Eigen::Index r = 0; r < k; ++r) {
        b[r] = -lcp.q[S[r]];
        for (Eigen::Index c = 0; c < k; ++c) A(r, c) = lcp.M(S[r], S[c]);
      }
      VectorXd zs;
      Eigen::FullPivLU<MatrixXd> lu(A);
      if (lu.isInvertible()) {
        zs = lu.solve(b);
      } else {
        // Minimum-norm representative of a solution family.
        zs = A.completeOrthogonalDecomposition().solve(b);
        if ((A * zs - b).cwiseAbs().maxCoeff() > tol) continue;
      }
      for (Eigen::Index r = 0; r < k; ++r) z[S[r]] = zs[r];
    }
    if (n > 0 && z.minCoeff() < -tol) continue;
    const VectorXd w = lcp.M * z + lcp.q;
    if (n > 0 && w.minCoeff() < -tol) continue;
    if (std::abs(z.dot(w)) > tol * (1.0 + z.norm() * w.norm())) continue;
    bool dup = false;
    for (const auto& sol : out) {
      if ((sol.z - z).cwiseAbs().maxCoeff() <= dedup_tol) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    LcpSolution sol;
    sol.z = z.cwiseMax(0.0);
    sol.w = lcp.M * sol.z + lcp.q;
    sol.status = LcpStatus::kSolved;
    out.push_back(std::move(sol));
  }
  return out;
}

}  // namespace multimpact
