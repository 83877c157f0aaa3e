#include "multimpact/set_approximation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "multimpact/error.hpp"

namespace multimpact {

const char* sampler_kind_name(SamplerKind kind) {
  return kind == SamplerKind::kSobol ? "sobol" : "uniform";
}

SamplerKind parse_sampler_kind(const std::string& name) {
  if (name == "sobol") return SamplerKind::kSobol;
  if (name == "uniform") return SamplerKind::kUniform;
  fail(ErrorCode::kInvalidArgument, "unknown sampler '" + name + "'");
}

double psi(const ImpactProblem& p) {
  Eigen::JacobiSVD<MatrixXd> svd(p.minv_jbar_t());
  const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  const double mu_max = p.num_contacts() ? p.mu().maxCoeff() : 0.0;
  return smax * p.num_contacts() * (1.0 + mu_max) + 1.0;
}

std::vector<double> trajectory_draws(const ApproximateParams& params, int contacts,
                                     std::size_t trajectory) {
  const std::size_t dim = params.n_traj_len * static_cast<std::size_t>(contacts);
  std::vector<double> out(dim);
  if (dim == 0) return out;
  if (params.sampler == SamplerKind::kSobol) {
    require(dim <= static_cast<std::size_t>(SobolStream::max_dimension()),
            ErrorCode::kUnsupported,
            "N * m = " + std::to_string(dim) +
                " exceeds the Sobol table; use the uniform sampler");
    SobolStream stream(static_cast<int>(dim));
    stream.point(params.seed + trajectory + 1, out);
  } else {
    UniformSampler s(derive_seed(params.seed, trajectory));
    s.draw(out);
  }
  return out;
}

PostImpactSet approximate(const ImpactProblem& p, const VelocityState& v0,
                          const ApproximateParams& params,
                          const StepOptions& opts) {
  require(v0.size() == p.num_velocities(), ErrorCode::kDimensionMismatch,
          "v0 length differs from problem size");
  require(params.epsilon > 0.0 && params.epsilon < params.h,
          ErrorCode::kInvalidArgument, "epsilon must lie in (0, h)");
  require(params.n_traj_len >= 1 && params.m_traj_count >= 1,
          ErrorCode::kInvalidArgument, "N and M must be >= 1");
  require(params.jobs >= 1, ErrorCode::kInvalidArgument, "jobs must be >= 1");

  const int m = p.num_contacts();
  const double ps = psi(p);
  const VectorXd finish = VectorXd::Constant(m, params.epsilon / (3.0 * ps));

  struct Slot {
    VelocityState pre, post;
    bool kept = false;
    std::exception_ptr error;
  };
  const std::size_t count = params.m_traj_count;
  std::vector<Slot> slots(count);

  auto run_one = [&](std::size_t j) {
    Slot& slot = slots[j];
    try {
      BlockSampler sampler(trajectory_draws(params, m, j),
                           sampler_kind_name(params.sampler));
      const Trajectory t = sim(p, v0, params.h, params.n_traj_len, sampler, opts, j);
      slot.pre = t.final_velocity();
      slot.post = sim_step(p, slot.pre, finish, opts).v_after;
      slot.kept = !is_impacting(p, slot.post, opts.impact_tol);
    } catch (...) {
      slot.error = std::current_exception();
    }
  };

  const auto workers = static_cast<std::size_t>(
      std::min<std::size_t>(static_cast<std::size_t>(params.jobs), count));
  if (workers <= 1) {
    for (std::size_t j = 0; j < count; ++j) run_one(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < count; j = next++) run_one(j);
      });
    }
    for (auto& t : pool) t.join();
  }

  PostImpactSet out;
  out.params = params;
  out.psi = ps;
  for (std::size_t j = 0; j < count; ++j) {
    Slot& slot = slots[j];
    if (slot.error) std::rethrow_exception(slot.error);
    if (!slot.kept) {
      ++out.rejected_count;
      continue;
    }
    out.samples.push_back(std::move(slot.post));
    out.pre_finish.push_back(std::move(slot.pre));
    out.trajectory_index.push_back(j);
  }
  return out;
}

NetCheck epsilon_net_check(const std::vector<VelocityState>& candidate,
                           const std::vector<VelocityState>& reference,
                           double epsilon) {
  require(!candidate.empty() && !reference.empty(), ErrorCode::kInvalidArgument,
          "epsilon-net check needs nonempty sets");
  NetCheck out;
  for (const auto& r : reference) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidate) {
      require(c.size() == r.size(), ErrorCode::kDimensionMismatch,
              "epsilon-net check: sample lengths differ");
      best = std::min(best, (c - r).norm());
      if (best == 0.0) break;
    }
    out.worst_gap = std::max(out.worst_gap, best);
  }
  out.ok = out.worst_gap <= epsilon;
  return out;
}

std::int64_t sample_count_bound(double h, double lipschitz_l, std::int64_t box_dim,
                                double epsilon, double delta) {
  require(h > 0.0 && lipschitz_l > 0.0 && box_dim > 0 && epsilon > 0.0 &&
              delta > 0.0 && delta < 1.0,
          ErrorCode::kInvalidArgument,
          "sample bound needs positive arguments and delta < 1");
  const double n = static_cast<double>(box_dim);
  const double cells = std::ceil(h * lipschitz_l * std::sqrt(n) / epsilon);
  if (!std::isfinite(cells)) return kSampleBoundCap;
  if (cells <= 1.0) return 1;
  const double log_omega = -n * std::log(cells);
  const double omega = std::exp(log_omega);
  if (omega == 0.0) return kSampleBoundCap;
  const double ratio = (std::log(delta) + log_omega) / std::log1p(-omega);
  if (!(ratio < 9.2e18)) return kSampleBoundCap;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(ratio)));
}

LipschitzEstimate estimate_step_lipschitz(const ImpactProblem& p,
                                          const VelocityState& v0, double h,
                                          std::size_t pairs, std::uint64_t seed,
                                          const StepOptions& opts) {
  require(h > 0.0, ErrorCode::kInvalidArgument, "h must be positive");
  const int m = p.num_contacts();
  const int nv = p.num_velocities();
  UniformSampler rng(seed);
  LipschitzEstimate est;
  std::vector<double> u(m), pert(nv + m);
  const double scale = 1e-4 * (1.0 + v0.norm());
  for (std::size_t k = 0; k < pairs; ++k) {
    // Base velocity: a random point along the segment from v0 towards the
    // state after one random step, so mid-impact velocities are covered.
    rng.draw(u);
    const VectorXd lam = h * Eigen::Map<VectorXd>(u.data(), m);
    std::vector<double> t(1);
    rng.draw(t);
    const VelocityState v1 = sim_step(p, v0, lam, opts).v_after;
    const VelocityState v = v0 + t[0] * (v1 - v0);

    rng.draw(u);
    const VectorXd lam_a = h * Eigen::Map<VectorXd>(u.data(), m);
    rng.draw(pert);
    VectorXd dv(nv), dl(m);
    for (int i = 0; i < nv; ++i) dv[i] = scale * (2.0 * pert[i] - 1.0);
    for (int i = 0; i < m; ++i) dl[i] = scale * (2.0 * pert[nv + i] - 1.0);
    const VectorXd lam_b = (lam_a + dl).cwiseMax(0.0);
    const VectorXd a = sim_step(p, v, lam_a, opts).v_after;
    const VectorXd b = sim_step(p, v + dv, lam_b, opts).v_after;
    const double din = std::sqrt(dv.squaredNorm() + (lam_b - lam_a).squaredNorm());
    if (din > 0.0) est.value = std::max(est.value, (a - b).norm() / din);
    ++est.pairs;
  }
  return est;
}

Comparison compare_methods(const ImpactProblem& p, const VelocityState& v0,
                           const ApproximateParams& params,
                           const StepOptions& opts) {
  Comparison out;
  const PostImpactSet set = approximate(p, v0, params, opts);
  for (std::size_t k = 0; k < set.samples.size(); ++k) {
    out.rows.push_back({"ours", set.trajectory_index[k], set.samples[k]});
  }
  out.rows.push_back({"anitescu", 0, anitescu_resolve(p, v0, opts).v_plus});

  std::vector<int> order(p.num_contacts());
  for (int i = 0; i < p.num_contacts(); ++i) order[i] = i;
  std::size_t index = 0;
  do {
    std::string tag = "sequential:";
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k) tag += '>';
      tag += p.labels()[order[k]];
    }
    try {
      const Trajectory t = sequential_resolve(p, v0, order, 100, opts);
      out.rows.push_back({tag, index, t.final_velocity()});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kIterationCap) throw;
      out.capped_orders.push_back(tag);
    }
    ++index;
  } while (p.num_contacts() <= 5 && std::next_permutation(order.begin(), order.end()));
  return out;
}

std::vector<VelocityState> reflect_samples(const std::vector<VelocityState>& samples,
                                           const MatrixXd& reflection) {
  std::vector<VelocityState> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    require(s.size() == reflection.cols(), ErrorCode::kDimensionMismatch,
            "reflection size differs from sample length");
    out.push_back(reflection * s);
  }
  return out;
}

}  // namespace multimpact
