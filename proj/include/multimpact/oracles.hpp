#pragma once

#include <vector>

#include "multimpact/contact_model.hpp"
#include "multimpact/lcp.hpp"

namespace multimpact {

struct DenseTrajectory {
  std::vector<double> s_grid;
  std::vector<VelocityState> v_grid;
};

struct RouthOptions {
  // Stick band on |J_t v|, relative to |v0|.
  double slip_tol_rel = 1e-6;
  // Impulse budget as a multiple of the frictionless stopping impulse.
  double budget_factor = 1e3;
};

// Single-contact differential impact resolution, integrated in the
// accumulated normal impulse s. Sliding segments are linear in s and are
// stepped with events at slip reversal and at separation located exactly.
DenseTrajectory routh_dense_reference(const ImpactProblem& p,
                                      const VelocityState& v0, double ds,
                                      const RouthOptions& opts = {});

// Every solution of a small LCP, found by enumerating complementary
// supports. Limited to n <= 14.
std::vector<LcpSolution> brute_force_lcp(const LcpInstance& lcp,
                                         double dedup_tol = 1e-8,
                                         double feas_tol = 1e-9);

}  // namespace multimpact
