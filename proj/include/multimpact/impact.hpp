#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "multimpact/contact_model.hpp"
#include "multimpact/lcp.hpp"
#include "multimpact/sampling.hpp"

namespace multimpact {

struct IndexRange {
  int begin = 0;
  int size = 0;
  int end() const { return begin + size; }
};

// Block order of the unknown z = [gamma_F; lambda_n; beta; gamma_v].
struct ImpactLcpLayout {
  IndexRange gamma_f, lambda_n, beta, gamma_v;
  int size = 0;
};

struct AssembledLcp {
  LcpInstance lcp;
  ImpactLcpLayout layout;
};

AssembledLcp assemble_impact_lcp(const ImpactProblem& p, const VelocityState& v,
                                 const VectorXd& lambda_max);

struct StepOptions {
  LemkeOptions lemke;
  double cone_tol = 1e-8;
  double impact_tol = kImpactTol;
};

struct StepRecord {
  VectorXd lambda_max, lambda_n, beta;
  VelocityState v_before, v_after;
  double energy_before = 0.0, energy_after = 0.0;
  int pivots = 0;
  bool solver_invoked = false;
};

// One implicit impulse increment. Returns the record; v_after is the new
// velocity.
StepRecord sim_step(const ImpactProblem& p, const VelocityState& v,
                    const VectorXd& lambda_max, const StepOptions& opts = {});

// Same, also handing back the solved LCP for audits.
StepRecord sim_step(const ImpactProblem& p, const VelocityState& v,
                    const VectorXd& lambda_max, const StepOptions& opts,
                    AssembledLcp* lcp_out, LcpSolution* sol_out);

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct Trajectory {
  std::vector<StepRecord> steps;
  bool terminated = false;
  std::uint64_t rng_seed = 0;
  double h = 0.0;
  std::string sampler;
  VelocityState v0;

  const VelocityState& final_velocity() const {
    return steps.empty() ? v0 : steps.back().v_after;
  }
};

// Draw lambda_max = h * sample and step until the velocity stops impacting
// or n_max steps have run.
Trajectory sim(const ImpactProblem& p, const VelocityState& v0, double h,
               std::size_t n_max, ImpulseSampler& sampler,
               const StepOptions& opts = {}, std::uint64_t rng_seed = 0);

struct AnitescuResult {
  VelocityState v_plus;
  VectorXd lambda_n, beta;
  int pivots = 0;
};

// One-shot simultaneous inelastic impact with unbounded impulse.
AnitescuResult anitescu_resolve(const ImpactProblem& p, const VelocityState& v,
                                const StepOptions& opts = {});

// Single-contact impacts in round-robin over `order`. Contacts not named in
// `order` follow it in index order. Each step is stored with lambda_max set
// to +inf on the resolved contact and zero elsewhere.
Trajectory sequential_resolve(const ImpactProblem& p, const VelocityState& v,
                              const std::vector<int>& order,
                              std::size_t iteration_cap = 100,
                              const StepOptions& opts = {});

// l1-minimal r with (M^-1 F) . r >= 1 on every extreme ray F of the
// linearized friction cones.
VectorXd compute_r(const ImpactProblem& p, const LemkeOptions& opts = {});

struct TerminationConstant {
  long long c = 0;
  int contacts = 0;
  VectorXd r;

  double tail_bound(double k) const;
};

TerminationConstant termination_constant(const ImpactProblem& p, double h);

}  // namespace multimpact
