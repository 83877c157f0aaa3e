#include "multimpact/multimpact.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "multimpact/error.hpp"
#include "multimpact/io.hpp"
#include "multimpact/outcomes.hpp"

using namespace multimpact;

struct mi_scene {
  Scene scene;
};
struct mi_problem {
  ImpactProblem problem;
};
struct mi_trajectory {
  Trajectory traj;
};
struct mi_set {
  PostImpactSet set;
};
struct mi_dense {
  DenseTrajectory dense;
};
struct mi_comparison {
  Comparison cmp;
};

namespace {

thread_local std::string g_last_error;

mi_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return MI_ERR_DIMENSION;
    case ErrorCode::kInvalidArgument: return MI_ERR_INVALID_ARGUMENT;
    case ErrorCode::kNotPositiveDefinite: return MI_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::kSolverFailure: return MI_ERR_SOLVER;
    case ErrorCode::kConeViolation: return MI_ERR_CONE_VIOLATION;
    case ErrorCode::kNonDegeneracyViolation: return MI_ERR_NON_DEGENERACY;
    case ErrorCode::kIterationCap: return MI_ERR_ITERATION_CAP;
    case ErrorCode::kBudgetExceeded: return MI_ERR_BUDGET;
    case ErrorCode::kAsymmetricScene: return MI_ERR_ASYMMETRIC;
    case ErrorCode::kUnsupported: return MI_ERR_UNSUPPORTED;
    case ErrorCode::kParse: return MI_ERR_PARSE;
    case ErrorCode::kIo: return MI_ERR_IO;
  }
  return MI_ERR_INTERNAL;
}

template <typename F>
mi_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MI_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MI_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MI_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return MI_ERR_INTERNAL;
  }
}

void need(const void* ptr, const char* what) {
  if (!ptr) fail(ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

VectorXd read_vec(const double* data, int n, const char* what) {
  need(data, what);
  return Eigen::Map<const VectorXd>(data, n);
}

void write_vec(const VectorXd& v, double* out) {
  if (out) std::memcpy(out, v.data(), sizeof(double) * v.size());
}

// Copies text out under the (buf, cap, needed) convention.
mi_status text_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buf || cap < text.size() + 1) {
    g_last_error = "output buffer too small";
    return MI_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return MI_OK;
}

ExportMeta make_meta(const char* scene_name, const char* meta_json) {
  ExportMeta meta;
  meta.scene = scene_name ? scene_name : "";
  if (meta_json && *meta_json) {
    json j;
    try {
      j = json::parse(meta_json);
    } catch (const json::exception& e) {
      fail(ErrorCode::kParse, std::string("metadata: ") + e.what());
    }
    require(j.is_object(), ErrorCode::kParse, "metadata must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      meta.fields.emplace_back(it.key(),
                               it.value().is_string() ? it.value().get<std::string>()
                                                      : it.value().dump());
    }
  }
  return meta;
}

template <typename CsvF, typename JsonF>
void write_output(const char* path, mi_format format, CsvF&& csv, JsonF&& js) {
  need(path, "path");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, std::string("cannot open '") + path + "' for writing");
  if (format == MI_FORMAT_CSV) {
    csv(out);
  } else {
    out << js().dump(2) << '\n';
  }
  out.flush();
  if (!out) fail(ErrorCode::kIo, std::string("write to '") + path + "' failed");
}

ApproximateParams to_params(const mi_approx_params* prm) {
  need(prm, "params");
  ApproximateParams out;
  out.h = prm->h;
  out.epsilon = prm->epsilon;
  out.n_traj_len = prm->n;
  out.m_traj_count = prm->m;
  out.seed = prm->seed;
  out.sampler = prm->sampler == MI_SAMPLER_UNIFORM ? SamplerKind::kUniform
                                                   : SamplerKind::kSobol;
  out.jobs = prm->jobs;
  return out;
}

}  // namespace

extern "C" {

const char* mi_version(void) { return "1.0.0"; }

const char* mi_status_name(mi_status status) {
  switch (status) {
    case MI_OK: return "ok";
    case MI_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MI_ERR_DIMENSION: return "dimension mismatch";
    case MI_ERR_NOT_POSITIVE_DEFINITE: return "not positive definite";
    case MI_ERR_SOLVER: return "solver failure";
    case MI_ERR_CONE_VIOLATION: return "cone violation";
    case MI_ERR_NON_DEGENERACY: return "non-degeneracy violation";
    case MI_ERR_ITERATION_CAP: return "iteration cap";
    case MI_ERR_BUDGET: return "budget exceeded";
    case MI_ERR_ASYMMETRIC: return "asymmetric scene";
    case MI_ERR_UNSUPPORTED: return "unsupported";
    case MI_ERR_PARSE: return "parse error";
    case MI_ERR_IO: return "i/o error";
    case MI_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case MI_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* mi_last_error(void) { return g_last_error.c_str(); }

mi_status mi_scene_builtin(const char* name, mi_scene** out) {
  return guard([&] {
    need(name, "name");
    need(out, "out");
    *out = new mi_scene{builtin_scene(name)};
  });
}

mi_status mi_scene_load_file(const char* path, mi_scene** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new mi_scene{load_scene_file(path)};
  });
}

mi_status mi_scene_load_json(const char* text, mi_scene** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      fail(ErrorCode::kParse, e.what());
    }
    *out = new mi_scene{scene_from_json(j)};
  });
}

void mi_scene_destroy(mi_scene* scene) { delete scene; }

mi_status mi_scene_to_json(const mi_scene* scene, char* buf, size_t cap,
                           size_t* needed) {
  std::string text;
  const mi_status st = guard([&] {
    need(scene, "scene");
    text = scene_to_json(scene->scene).dump(2) + "\n";
  });
  return st == MI_OK ? text_out(text, buf, cap, needed) : st;
}

mi_status mi_scene_name(const mi_scene* scene, char* buf, size_t cap, size_t* needed) {
  if (!scene) return guard([] { need(nullptr, "scene"); });
  return text_out(scene->scene.name, buf, cap, needed);
}

mi_status mi_scene_problem(const mi_scene* scene, mi_problem** out) {
  return guard([&] {
    need(scene, "scene");
    need(out, "out");
    *out = new mi_problem{build_problem(scene->scene)};
  });
}

mi_status mi_scene_v0(const mi_scene* scene, double* out, size_t cap) {
  return guard([&] {
    need(scene, "scene");
    need(out, "out");
    const VectorXd& v0 = scene->scene.v0;
    require(cap >= static_cast<size_t>(v0.size()), ErrorCode::kDimensionMismatch,
            "v0 buffer too small");
    write_vec(v0, out);
  });
}

mi_status mi_scene_defaults(const mi_scene* scene, double* h, size_t* n,
                            size_t* m_paper) {
  return guard([&] {
    need(scene, "scene");
    const SimDefaults& d = scene->scene.defaults;
    if (h) *h = d.h;
    if (n) *n = d.n;
    if (m_paper) *m_paper = d.m_paper;
  });
}

mi_status mi_scene_reflect_map(const mi_scene* scene, double* out, size_t cap) {
  return guard([&] {
    need(scene, "scene");
    need(out, "out");
    const MatrixXd R = reflect_map(scene->scene);
    require(cap >= static_cast<size_t>(R.size()), ErrorCode::kDimensionMismatch,
            "reflection buffer too small");
    for (Eigen::Index r = 0; r < R.rows(); ++r) {
      for (Eigen::Index c = 0; c < R.cols(); ++c) out[r * R.cols() + c] = R(r, c);
    }
  });
}

mi_status mi_problem_create(int nv, int m, const double* mass, const double* jn,
                            const double* jt, const double* mu, mi_problem** out) {
  return guard([&] {
    need(out, "out");
    require(nv > 0 && m >= 0, ErrorCode::kDimensionMismatch, "bad problem sizes");
    need(mass, "mass");
    need(mu, "mu");
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    MatrixXd M = Eigen::Map<const RowMat>(mass, nv, nv);
    MatrixXd Jn(m, nv), Jt(m, nv);
    if (m > 0) {
      need(jn, "jn");
      need(jt, "jt");
      Jn = Eigen::Map<const RowMat>(jn, m, nv);
      Jt = Eigen::Map<const RowMat>(jt, m, nv);
    }
    *out = new mi_problem{
        ImpactProblem::from_tangent(M, Jn, Jt, Eigen::Map<const VectorXd>(mu, m))};
  });
}

mi_status mi_problem_from_json(const char* text, mi_problem** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      fail(ErrorCode::kParse, e.what());
    }
    *out = new mi_problem{problem_from_json(j)};
  });
}

void mi_problem_destroy(mi_problem* p) { delete p; }

int mi_problem_num_contacts(const mi_problem* p) {
  return p ? p->problem.num_contacts() : 0;
}

int mi_problem_num_velocities(const mi_problem* p) {
  return p ? p->problem.num_velocities() : 0;
}

mi_status mi_problem_restrict(const mi_problem* p, const int* contacts, size_t count,
                              mi_problem** out) {
  return guard([&] {
    need(p, "problem");
    need(contacts, "contacts");
    need(out, "out");
    *out = new mi_problem{
        p->problem.restricted_to(std::vector<int>(contacts, contacts + count))};
  });
}

mi_status mi_problem_contact_index(const mi_problem* p, const char* label, int* out) {
  return guard([&] {
    need(p, "problem");
    need(label, "label");
    need(out, "out");
    *out = p->problem.contact_index(label);
  });
}

mi_status mi_problem_to_json(const mi_problem* p, char* buf, size_t cap,
                             size_t* needed) {
  std::string text;
  const mi_status st = guard([&] {
    need(p, "problem");
    text = problem_to_json(p->problem).dump(2) + "\n";
  });
  return st == MI_OK ? text_out(text, buf, cap, needed) : st;
}

mi_status mi_kinetic_energy(const mi_problem* p, const double* v, double* out) {
  return guard([&] {
    need(p, "problem");
    need(out, "out");
    *out = kinetic_energy(p->problem, read_vec(v, p->problem.num_velocities(), "v"));
  });
}

mi_status mi_mass_norm(const mi_problem* p, const double* v, double* out) {
  return guard([&] {
    need(p, "problem");
    need(out, "out");
    *out = mass_norm(p->problem, read_vec(v, p->problem.num_velocities(), "v"));
  });
}

mi_status mi_is_impacting(const mi_problem* p, const double* v, double tol_v,
                          int* out) {
  return guard([&] {
    need(p, "problem");
    need(out, "out");
    require(tol_v >= 0.0, ErrorCode::kInvalidArgument, "tol_v must be >= 0");
    *out = is_impacting(p->problem, read_vec(v, p->problem.num_velocities(), "v"), tol_v)
               ? 1
               : 0;
  });
}

mi_status mi_sim_step(const mi_problem* p, const double* v, const double* lambda_max,
                      double* v_after, double* lambda_n, double* beta) {
  return guard([&] {
    need(p, "problem");
    const auto& P = p->problem;
    const StepRecord rec =
        sim_step(P, read_vec(v, P.num_velocities(), "v"),
                 read_vec(lambda_max, P.num_contacts(), "lambda_max"));
    write_vec(rec.v_after, v_after);
    write_vec(rec.lambda_n, lambda_n);
    write_vec(rec.beta, beta);
  });
}

mi_status mi_simulate(const mi_problem* p, const double* v0, double h, size_t n_max,
                      mi_sampler sampler, uint64_t seed, mi_trajectory** out) {
  return guard([&] {
    need(p, "problem");
    need(out, "out");
    const auto& P = p->problem;
    const VectorXd v = read_vec(v0, P.num_velocities(), "v0");
    Trajectory t;
    if (sampler == MI_SAMPLER_UNIFORM) {
      UniformSampler s(seed);
      t = sim(P, v, h, n_max, s, {}, seed);
    } else {
      SobolSampler s(std::max(1, P.num_contacts()), seed + 1);
      t = sim(P, v, h, n_max, s, {}, seed);
    }
    *out = new mi_trajectory{std::move(t)};
  });
}

mi_status mi_anitescu_resolve(const mi_problem* p, const double* v, double* v_plus) {
  return guard([&] {
    need(p, "problem");
    need(v_plus, "v_plus");
    const auto& P = p->problem;
    write_vec(anitescu_resolve(P, read_vec(v, P.num_velocities(), "v")).v_plus, v_plus);
  });
}

mi_status mi_sequential_resolve(const mi_problem* p, const double* v, const int* order,
                                size_t order_len, size_t iteration_cap,
                                mi_trajectory** out) {
  return guard([&] {
    need(p, "problem");
    need(order, "order");
    need(out, "out");
    const auto& P = p->problem;
    *out = new mi_trajectory{sequential_resolve(
        P, read_vec(v, P.num_velocities(), "v"),
        std::vector<int>(order, order + order_len), iteration_cap)};
  });
}

mi_status mi_compute_r(const mi_problem* p, double* r) {
  return guard([&] {
    need(p, "problem");
    need(r, "r");
    write_vec(compute_r(p->problem), r);
  });
}

mi_status mi_termination_constant(const mi_problem* p, double h, long long* c,
                                  double* r) {
  return guard([&] {
    need(p, "problem");
    const TerminationConstant tc = termination_constant(p->problem, h);
    if (c) *c = tc.c;
    write_vec(tc.r, r);
  });
}

void mi_trajectory_destroy(mi_trajectory* t) { delete t; }

size_t mi_trajectory_num_steps(const mi_trajectory* t) {
  return t ? t->traj.steps.size() : 0;
}

int mi_trajectory_terminated(const mi_trajectory* t) {
  return t && t->traj.terminated ? 1 : 0;
}

mi_status mi_trajectory_step(const mi_trajectory* t, size_t k, double* lambda_max,
                             double* lambda_n, double* beta, double* v_after,
                             double* energy) {
  return guard([&] {
    need(t, "trajectory");
    require(k < t->traj.steps.size(), ErrorCode::kInvalidArgument,
            "step index out of range");
    const StepRecord& s = t->traj.steps[k];
    write_vec(s.lambda_max, lambda_max);
    write_vec(s.lambda_n, lambda_n);
    write_vec(s.beta, beta);
    write_vec(s.v_after, v_after);
    if (energy) *energy = s.energy_after;
  });
}

mi_status mi_trajectory_final_velocity(const mi_trajectory* t, double* out) {
  return guard([&] {
    need(t, "trajectory");
    need(out, "out");
    write_vec(t->traj.final_velocity(), out);
  });
}

mi_status mi_trajectory_write(const mi_trajectory* t, const mi_problem* p,
                              const char* path, mi_format format,
                              const char* scene_name, const char* meta_json) {
  return guard([&] {
    need(t, "trajectory");
    need(p, "problem");
    const ExportMeta meta = make_meta(scene_name, meta_json);
    write_output(
        path, format,
        [&](std::ostream& os) { write_trajectory_csv(os, t->traj, p->problem, meta); },
        [&] { return trajectory_to_json(t->traj, p->problem, meta); });
  });
}

mi_status mi_psi(const mi_problem* p, double* out) {
  return guard([&] {
    need(p, "problem");
    need(out, "out");
    *out = psi(p->problem);
  });
}

mi_status mi_approximate(const mi_problem* p, const double* v0,
                         const mi_approx_params* params, mi_set** out) {
  return guard([&] {
    need(p, "problem");
    need(out, "out");
    const auto& P = p->problem;
    *out = new mi_set{
        approximate(P, read_vec(v0, P.num_velocities(), "v0"), to_params(params))};
  });
}

void mi_set_destroy(mi_set* s) { delete s; }

size_t mi_set_size(const mi_set* s) { return s ? s->set.samples.size() : 0; }

size_t mi_set_rejected(const mi_set* s) { return s ? s->set.rejected_count : 0; }

mi_status mi_set_sample(const mi_set* s, size_t k, double* v) {
  return guard([&] {
    need(s, "set");
    need(v, "v");
    require(k < s->set.samples.size(), ErrorCode::kInvalidArgument,
            "sample index out of range");
    write_vec(s->set.samples[k], v);
  });
}

mi_status mi_set_write(const mi_set* s, const mi_problem* p, const char* path,
                       mi_format format, const char* scene_name,
                       const char* meta_json) {
  return guard([&] {
    need(s, "set");
    need(p, "problem");
    const ExportMeta meta = make_meta(scene_name, meta_json);
    write_output(
        path, format,
        [&](std::ostream& os) { write_set_csv(os, s->set, p->problem, meta); },
        [&] { return set_to_json(s->set, p->problem, meta); });
  });
}

mi_status mi_set_summary_json(const mi_set* s, const mi_problem* p, double tol,
                              char* buf, size_t cap, size_t* needed) {
  std::string text;
  const mi_status st = guard([&] {
    need(s, "set");
    need(p, "problem");
    const auto& P = p->problem;
    const OutcomeHistogram h = classify_outcomes(s->set.samples, P, tol);
    json per = json::object();
    for (int i = 0; i < P.num_contacts(); ++i) {
      per[P.labels()[i]] = json{{"stick", h.per_contact[i][0]},
                                {"slide", h.per_contact[i][1]},
                                {"lift", h.per_contact[i][2]}};
    }
    json joint = json::object();
    for (const auto& [k, v] : h.joint) joint[k] = v;
    text = json{{"samples", s->set.samples.size()},
                {"rejected", s->set.rejected_count},
                {"per_contact", per},
                {"joint", joint}}
               .dump(2) +
           "\n";
  });
  return st == MI_OK ? text_out(text, buf, cap, needed) : st;
}

mi_status mi_sample_count_bound(double h, double lipschitz_l, int64_t box_dim,
                                double epsilon, double delta, int64_t* out) {
  return guard([&] {
    need(out, "out");
    *out = sample_count_bound(h, lipschitz_l, box_dim, epsilon, delta);
  });
}

mi_status mi_epsilon_net_check(const double* candidate, size_t n_candidate,
                               const double* reference, size_t n_reference,
                               size_t dim, double epsilon, int* ok,
                               double* worst_gap) {
  return guard([&] {
    need(candidate, "candidate");
    need(reference, "reference");
    auto unpack = [dim](const double* data, size_t n) {
      std::vector<VelocityState> out;
      for (size_t k = 0; k < n; ++k) {
        out.emplace_back(Eigen::Map<const VectorXd>(data + k * dim, dim));
      }
      return out;
    };
    const NetCheck nc = epsilon_net_check(unpack(candidate, n_candidate),
                                          unpack(reference, n_reference), epsilon);
    if (ok) *ok = nc.ok ? 1 : 0;
    if (worst_gap) *worst_gap = nc.worst_gap;
  });
}

mi_status mi_compare(const mi_problem* p, const double* v0,
                     const mi_approx_params* params, mi_comparison** out) {
  return guard([&] {
    need(p, "problem");
    need(out, "out");
    const auto& P = p->problem;
    *out = new mi_comparison{
        compare_methods(P, read_vec(v0, P.num_velocities(), "v0"), to_params(params))};
  });
}

void mi_comparison_destroy(mi_comparison* c) { delete c; }

size_t mi_comparison_size(const mi_comparison* c) { return c ? c->cmp.rows.size() : 0; }

mi_status mi_comparison_row(const mi_comparison* c, size_t k, char* method, size_t cap,
                            size_t* needed, double* v) {
  const mi_status st = guard([&] {
    need(c, "comparison");
    require(k < c->cmp.rows.size(), ErrorCode::kInvalidArgument,
            "row index out of range");
    write_vec(c->cmp.rows[k].v, v);
  });
  if (st != MI_OK) return st;
  if (!method && !needed) return MI_OK;
  return text_out(c->cmp.rows[k].method, method, cap, needed);
}

mi_status mi_comparison_write(const mi_comparison* c, const mi_problem* p,
                              const char* path, mi_format format,
                              const char* scene_name, const char* meta_json) {
  return guard([&] {
    need(c, "comparison");
    need(p, "problem");
    ExportMeta meta = make_meta(scene_name, meta_json);
    if (!c->cmp.capped_orders.empty()) {
      std::string capped;
      for (const auto& o : c->cmp.capped_orders) capped += (capped.empty() ? "" : " ") + o;
      meta.fields.emplace_back("iteration_capped", capped);
    }
    write_output(
        path, format,
        [&](std::ostream& os) { write_compare_csv(os, c->cmp.rows, p->problem, meta); },
        [&] { return compare_to_json(c->cmp.rows, p->problem, meta); });
  });
}

mi_status mi_routh_dense(const mi_problem* p, const double* v0, double ds,
                         mi_dense** out) {
  return guard([&] {
    need(p, "problem");
    need(out, "out");
    const auto& P = p->problem;
    *out = new mi_dense{
        routh_dense_reference(P, read_vec(v0, P.num_velocities(), "v0"), ds)};
  });
}

void mi_dense_destroy(mi_dense* d) { delete d; }

size_t mi_dense_size(const mi_dense* d) { return d ? d->dense.s_grid.size() : 0; }

mi_status mi_dense_point(const mi_dense* d, size_t k, double* s, double* v) {
  return guard([&] {
    need(d, "dense trajectory");
    require(k < d->dense.s_grid.size(), ErrorCode::kInvalidArgument,
            "point index out of range");
    if (s) *s = d->dense.s_grid[k];
    write_vec(d->dense.v_grid[k], v);
  });
}

mi_status mi_dense_write(const mi_dense* d, const mi_problem* p, const char* path,
                         mi_format format, const char* scene_name,
                         const char* meta_json) {
  return guard([&] {
    need(d, "dense trajectory");
    need(p, "problem");
    const ExportMeta meta = make_meta(scene_name, meta_json);
    write_output(
        path, format,
        [&](std::ostream& os) { write_dense_csv(os, d->dense, p->problem, meta); },
        [&] { return dense_to_json(d->dense, p->problem, meta); });
  });
}

mi_status mi_lemke_solve(int n, const double* M, const double* q, double* z,
                         int* pivots, int* status) {
  return guard([&] {
    require(n >= 0, ErrorCode::kDimensionMismatch, "n must be >= 0");
    need(z, "z");
    LcpInstance lcp;
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    if (n > 0) {
      need(M, "M");
      lcp.M = Eigen::Map<const RowMat>(M, n, n);
    } else {
      lcp.M.resize(0, 0);
    }
    lcp.q = read_vec(q, n, "q");
    const LcpSolution sol = lemke_solve(lcp);
    write_vec(sol.z, z);
    if (pivots) *pivots = sol.pivot_count;
    if (status) *status = static_cast<int>(sol.status);
  });
}

}  // extern "C"
