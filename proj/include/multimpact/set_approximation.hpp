#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "multimpact/impact.hpp"

namespace multimpact {

enum class SamplerKind { kSobol, kUniform };

const char* sampler_kind_name(SamplerKind kind);
SamplerKind parse_sampler_kind(const std::string& name);

struct ApproximateParams {
  double h = 0.0;
  double epsilon = 0.0;
  std::size_t n_traj_len = 1;
  std::size_t m_traj_count = 1;
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::kSobol;
  // Worker threads; results do not depend on it.
  int jobs = 1;
};

struct PostImpactSet {
  std::vector<VelocityState> samples;
  // Trajectory each sample came from, and its velocity before finishing.
  std::vector<std::size_t> trajectory_index;
  std::vector<VelocityState> pre_finish;
  std::size_t rejected_count = 0;
  double psi = 0.0;
  ApproximateParams params;
};

double psi(const ImpactProblem& p);

// Trajectory j draws its impulses from a disjoint block: for Sobol, point
// seed + j + 1 of the (N m)-dimensional sequence; for the uniform sampler,
// a generator seeded from (seed, j).
PostImpactSet approximate(const ImpactProblem& p, const VelocityState& v0,
                          const ApproximateParams& params,
                          const StepOptions& opts = {});

std::vector<double> trajectory_draws(const ApproximateParams& params, int contacts,
                                     std::size_t trajectory);

struct NetCheck {
  bool ok = false;
  double worst_gap = 0.0;
};

NetCheck epsilon_net_check(const std::vector<VelocityState>& candidate,
                           const std::vector<VelocityState>& reference,
                           double epsilon);

inline constexpr std::int64_t kSampleBoundCap = INT64_MAX;

std::int64_t sample_count_bound(double h, double lipschitz_l, std::int64_t box_dim,
                                double epsilon, double delta);

// Empirical one-step Lipschitz ratio. Not a certified bound.
struct LipschitzEstimate {
  double value = 0.0;
  std::size_t pairs = 0;
  bool certified = false;
};

LipschitzEstimate estimate_step_lipschitz(const ImpactProblem& p,
                                          const VelocityState& v0, double h,
                                          std::size_t pairs, std::uint64_t seed,
                                          const StepOptions& opts = {});

// One tagged post-impact velocity in a method comparison.
struct CompareRow {
  std::string method;
  std::size_t index = 0;
  VelocityState v;
};

struct Comparison {
  std::vector<CompareRow> rows;
  // Sequential orders that hit the iteration cap and produced no row.
  std::vector<std::string> capped_orders;
};

// Sampled set ("ours"), the simultaneous impact ("anitescu"), and every
// sequential order ("sequential:A>B"); all permutations when m <= 5,
// otherwise index order only.
Comparison compare_methods(const ImpactProblem& p, const VelocityState& v0,
                           const ApproximateParams& params,
                           const StepOptions& opts = {});

std::vector<VelocityState> reflect_samples(const std::vector<VelocityState>& samples,
                                           const MatrixXd& reflection);

}  // namespace multimpact
