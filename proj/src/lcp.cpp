#include "multimpact/lcp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "multimpact/error.hpp"

namespace multimpact {

void LcpInstance::validate() const {
  require(M.rows() == M.cols(), ErrorCode::kDimensionMismatch,
          "LCP matrix is not square");
  require(M.rows() == q.size(), ErrorCode::kDimensionMismatch,
          "LCP vector length does not match matrix");
  require(M.allFinite() && q.allFinite(), ErrorCode::kInvalidArgument,
          "LCP data contains non-finite entries");
}

const char* lcp_status_name(LcpStatus status) {
  switch (status) {
    case LcpStatus::kSolved: return "solved";
    case LcpStatus::kRayTermination: return "ray_termination";
    case LcpStatus::kMaxPivots: return "max_pivots";
  }
  return "unknown";
}

double LcpResiduals::max() const { return std::max({comp_gap, neg_z, neg_w}); }

LcpResiduals residuals(const LcpInstance& lcp, const VectorXd& z) {
  require(z.size() == lcp.size(), ErrorCode::kDimensionMismatch,
          "residuals: z has wrong length");
  const VectorXd w = lcp.M * z + lcp.q;
  LcpResiduals r;
  r.comp_gap = std::abs(z.dot(w));
  r.neg_z = z.size() ? std::max(0.0, -z.minCoeff()) : 0.0;
  r.neg_w = w.size() ? std::max(0.0, -w.minCoeff()) : 0.0;
  return r;
}

namespace {

// Tableau columns: [0, n) w, [n, 2n) z, 2n the artificial z0, 2n + 1 rhs.
// The w block always equals the current basis inverse, which is what the
// lexicographic comparison reads.
class LemkeTableau {
 public:
  LemkeTableau(const LcpInstance& lcp, double tol)
      : n_(lcp.size()), tol_(tol), T_(n_, 2 * n_ + 2), basis_(n_) {
    T_.setZero();
    T_.leftCols(n_).setIdentity();
    T_.middleCols(n_, n_) = -lcp.M;
    T_.col(2 * n_).setConstant(-1.0);
    T_.col(rhs()) = lcp.q;
    for (Eigen::Index i = 0; i < n_; ++i) basis_[i] = i;
  }

  Eigen::Index z0() const { return 2 * n_; }
  Eigen::Index rhs() const { return 2 * n_ + 1; }
  Eigen::Index complement(Eigen::Index var) const {
    return var < n_ ? var + n_ : var - n_;
  }

  // Row whose [rhs, B^-1] row scaled by the pivot column is lexicographically
  // smallest.
  Eigen::Index lexmin_row(const std::vector<Eigen::Index>& rows,
                          Eigen::Index col) const {
    Eigen::Index best = rows.front();
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (lex_less(rows[k], best, col)) best = rows[k];
    }
    return best;
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    T_.row(row) /= T_(row, col);
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (i == row) continue;
      const double f = T_(i, col);
      if (f != 0.0) T_.row(i) -= f * T_.row(row);
    }
    basis_[row] = col;
  }

  const MatrixXd& table() const { return T_; }
  const std::vector<Eigen::Index>& basis() const { return basis_; }

 private:
  bool lex_less(Eigen::Index a, Eigen::Index b, Eigen::Index col) const {
    const double da = T_(a, col);
    const double db = T_(b, col);
    auto cmp = [&](Eigen::Index c) {
      const double xa = T_(a, c) / da;
      const double xb = T_(b, c) / db;
      const double scale = 1.0 + std::abs(xa) + std::abs(xb);
      if (xa < xb - tol_ * scale) return -1;
      if (xa > xb + tol_ * scale) return 1;
      return 0;
    };
    if (int c = cmp(rhs())) return c < 0;
    for (Eigen::Index c = 0; c < n_; ++c) {
      if (int r = cmp(c)) return r < 0;
    }
    return false;
  }

  Eigen::Index n_;
  double tol_;
  MatrixXd T_;
  std::vector<Eigen::Index> basis_;
};

// Re-solve the final complementary basis directly; pivoting accumulates
// rounding that a single factorization does not.
VectorXd polish(const LcpInstance& lcp, const VectorXd& z) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] > 0.0) support.push_back(i);
  }
  if (support.empty()) return z;
  const auto k = static_cast<Eigen::Index>(support.size());
  MatrixXd A(k, k);
  VectorXd b(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    b[r] = -lcp.q[support[r]];
    for (Eigen::Index c = 0; c < k; ++c) A(r, c) = lcp.M(support[r], support[c]);
  }
  Eigen::FullPivLU<MatrixXd> lu(A);
  if (!lu.isInvertible()) return z;
  const VectorXd zs = lu.solve(b);
  VectorXd out = VectorXd::Zero(z.size());
  for (Eigen::Index r = 0; r < k; ++r) out[support[r]] = std::max(0.0, zs[r]);
  return residuals(lcp, out).max() <= residuals(lcp, z).max() ? out : z;
}

LcpSolution finish(const LcpInstance& lcp, VectorXd z, int pivots,
                   LcpStatus status) {
  LcpSolution sol;
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = std::max(0.0, z[i]);
  if (status == LcpStatus::kSolved) z = polish(lcp, z);
  sol.z = std::move(z);
  sol.w = lcp.M * sol.z + lcp.q;
  sol.pivot_count = pivots;
  sol.status = status;
  return sol;
}

}  // namespace

LcpSolution lemke_solve(const LcpInstance& lcp, const LemkeOptions& opts) {
  lcp.validate();
  const Eigen::Index n = lcp.size();
  if (n == 0 || lcp.q.minCoeff() >= 0.0) {
    return finish(lcp, VectorXd::Zero(n), 0, LcpStatus::kSolved);
  }
  const int budget =
      opts.max_pivots > 0 ? opts.max_pivots : 1000 + 50 * static_cast<int>(n);

  LemkeTableau tab(lcp, opts.pivot_tol);
  auto extract = [&] {
    VectorXd z = VectorXd::Zero(n);
    const auto& basis = tab.basis();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (basis[i] >= n && basis[i] < 2 * n) z[basis[i] - n] = tab.table()(i, tab.rhs());
    }
    return z;
  };

  // z0 enters at the lexicographically smallest row of [q, I]. Among equal
  // q entries the identity tail makes the larger index the smaller row.
  Eigen::Index row = 0;
  {
    const auto& T = tab.table();
    for (Eigen::Index i = 1; i < n; ++i) {
      const double a = T(i, tab.rhs());
      const double b = T(row, tab.rhs());
      if (a <= b + opts.pivot_tol * (1.0 + std::abs(a) + std::abs(b))) row = i;
    }
  }
  Eigen::Index leaving = tab.basis()[row];
  tab.pivot(row, tab.z0());
  int pivots = 1;
  Eigen::Index entering = tab.complement(leaving);

  while (true) {
    if (pivots >= budget) {
      return finish(lcp, extract(), pivots, LcpStatus::kMaxPivots);
    }
    const auto& T = tab.table();
    std::vector<Eigen::Index> cands;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (T(i, entering) > opts.pivot_tol) cands.push_back(i);
    }
    if (cands.empty()) {
      return finish(lcp, extract(), pivots, LcpStatus::kRayTermination);
    }
    double theta = INFINITY;
    for (auto i : cands) theta = std::min(theta, T(i, tab.rhs()) / T(i, entering));
    Eigen::Index r = -1;
    for (auto i : cands) {
      if (tab.basis()[i] != tab.z0()) continue;
      const double ratio = T(i, tab.rhs()) / T(i, entering);
      if (ratio <= theta + opts.pivot_tol * (1.0 + std::abs(theta))) r = i;
    }
    if (r < 0) r = tab.lexmin_row(cands, entering);
    leaving = tab.basis()[r];
    tab.pivot(r, entering);
    ++pivots;
    if (leaving == tab.z0()) {
      return finish(lcp, extract(), pivots, LcpStatus::kSolved);
    }
    entering = tab.complement(leaving);
  }
}

bool copositivity_sample_check(const MatrixXd& M, int trials,
                               std::uint64_t rng_seed, double tol) {
  require(M.rows() == M.cols(), ErrorCode::kDimensionMismatch,
          "copositivity check needs a square matrix");
  require(trials >= 1, ErrorCode::kInvalidArgument, "trials must be >= 1");
  const Eigen::Index n = M.rows();
  if (n == 0) return true;
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  VectorXd x(n);
  for (int t = 0; t < trials; ++t) {
    // Mix dense and sparse supports so faces of the orthant get probed.
    const double keep = 0.1 + 0.9 * unit(rng);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = unit(rng) < keep ? expo(rng) : 0.0;
    }
    if (t < n) {
      x.setZero();
      x[t] = 1.0;
    }
    const double norm2 = x.squaredNorm();
    if (norm2 == 0.0) continue;
    if (x.dot(M * x) < -tol * norm2) return false;
  }
  return true;
}

}  // namespace multimpact
