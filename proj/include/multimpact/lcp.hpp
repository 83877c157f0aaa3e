#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace multimpact {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Find z >= 0 with w = Mz + q >= 0 and z'w = 0.
struct LcpInstance {
  MatrixXd M;
  VectorXd q;

  Eigen::Index size() const { return q.size(); }
  // Throws kDimensionMismatch or kInvalidArgument on malformed data.
  void validate() const;
};

enum class LcpStatus { kSolved, kRayTermination, kMaxPivots };

const char* lcp_status_name(LcpStatus status);

struct LcpSolution {
  VectorXd z;
  VectorXd w;
  int pivot_count = 0;
  LcpStatus status = LcpStatus::kSolved;
};

struct LemkeOptions {
  double pivot_tol = 1e-11;
  // 0 selects a size-dependent budget.
  int max_pivots = 0;
};

LcpSolution lemke_solve(const LcpInstance& lcp, const LemkeOptions& opts = {});

struct LcpResiduals {
  double comp_gap = 0.0;
  double neg_z = 0.0;
  double neg_w = 0.0;

  double max() const;
};

LcpResiduals residuals(const LcpInstance& lcp, const VectorXd& z);

// Probabilistic falsifier: false iff a sampled x >= 0 has x'Mx < -tol.
bool copositivity_sample_check(const MatrixXd& M, int trials,
                               std::uint64_t rng_seed, double tol = 1e-10);

}  // namespace multimpact
