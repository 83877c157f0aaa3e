/* C interface to the multimpact engine.
 *
 * Handles are opaque and owned by the caller; release each with its
 * matching *_destroy function. Every call that can fail returns an
 * mi_status, and on failure mi_last_error() describes the problem for the
 * calling thread. Matrices are dense row-major. Text outputs use the
 * (buf, cap, needed) convention: *needed receives the size including the
 * terminating NUL, and MI_ERR_BUFFER_TOO_SMALL is returned when cap is short.
 */
#ifndef MULTIMPACT_H
#define MULTIMPACT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MULTIMPACT_BUILD)
#define MI_API __declspec(dllexport)
#else
#define MI_API __declspec(dllimport)
#endif
#else
#define MI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mi_status {
  MI_OK = 0,
  MI_ERR_INVALID_ARGUMENT = 1,
  MI_ERR_DIMENSION = 2,
  MI_ERR_NOT_POSITIVE_DEFINITE = 3,
  MI_ERR_SOLVER = 4,
  MI_ERR_CONE_VIOLATION = 5,
  MI_ERR_NON_DEGENERACY = 6,
  MI_ERR_ITERATION_CAP = 7,
  MI_ERR_BUDGET = 8,
  MI_ERR_ASYMMETRIC = 9,
  MI_ERR_UNSUPPORTED = 10,
  MI_ERR_PARSE = 11,
  MI_ERR_IO = 12,
  MI_ERR_BUFFER_TOO_SMALL = 13,
  MI_ERR_INTERNAL = 14
} mi_status;

typedef enum mi_sampler { MI_SAMPLER_SOBOL = 0, MI_SAMPLER_UNIFORM = 1 } mi_sampler;

typedef enum mi_format { MI_FORMAT_CSV = 0, MI_FORMAT_JSON = 1 } mi_format;

typedef struct mi_scene mi_scene;
typedef struct mi_problem mi_problem;
typedef struct mi_trajectory mi_trajectory;
typedef struct mi_set mi_set;
typedef struct mi_dense mi_dense;
typedef struct mi_comparison mi_comparison;

typedef struct mi_approx_params {
  double h;
  double epsilon;
  size_t n;      /* steps per trajectory */
  size_t m;      /* trajectory count */
  uint64_t seed;
  mi_sampler sampler;
  int jobs;
} mi_approx_params;

MI_API const char* mi_version(void);
MI_API const char* mi_status_name(mi_status status);
MI_API const char* mi_last_error(void);

/* Scenes */
MI_API mi_status mi_scene_builtin(const char* name, mi_scene** out);
MI_API mi_status mi_scene_load_file(const char* path, mi_scene** out);
MI_API mi_status mi_scene_load_json(const char* text, mi_scene** out);
MI_API void mi_scene_destroy(mi_scene* scene);
MI_API mi_status mi_scene_to_json(const mi_scene* scene, char* buf, size_t cap,
                                  size_t* needed);
MI_API mi_status mi_scene_name(const mi_scene* scene, char* buf, size_t cap,
                               size_t* needed);
MI_API mi_status mi_scene_problem(const mi_scene* scene, mi_problem** out);
MI_API mi_status mi_scene_v0(const mi_scene* scene, double* out, size_t cap);
MI_API mi_status mi_scene_defaults(const mi_scene* scene, double* h, size_t* n,
                                   size_t* m_paper);
/* nv x nv reflection; MI_ERR_ASYMMETRIC when the scene has none. */
MI_API mi_status mi_scene_reflect_map(const mi_scene* scene, double* out, size_t cap);

/* Problems */
MI_API mi_status mi_problem_create(int nv, int m, const double* mass,
                                   const double* jn, const double* jt,
                                   const double* mu, mi_problem** out);
MI_API mi_status mi_problem_from_json(const char* text, mi_problem** out);
MI_API void mi_problem_destroy(mi_problem* p);
MI_API int mi_problem_num_contacts(const mi_problem* p);
MI_API int mi_problem_num_velocities(const mi_problem* p);
/* Subproblem on the listed contacts, in that order. */
MI_API mi_status mi_problem_restrict(const mi_problem* p, const int* contacts,
                                     size_t count, mi_problem** out);
MI_API mi_status mi_problem_contact_index(const mi_problem* p, const char* label,
                                          int* out);
MI_API mi_status mi_problem_to_json(const mi_problem* p, char* buf, size_t cap,
                                    size_t* needed);
MI_API mi_status mi_kinetic_energy(const mi_problem* p, const double* v, double* out);
MI_API mi_status mi_mass_norm(const mi_problem* p, const double* v, double* out);
MI_API mi_status mi_is_impacting(const mi_problem* p, const double* v, double tol_v,
                                 int* out);

/* Impact resolution. Output arrays may be NULL when not wanted; sizes are
 * nv for velocities, m for lambda_n and 2m for beta. */
MI_API mi_status mi_sim_step(const mi_problem* p, const double* v,
                             const double* lambda_max, double* v_after,
                             double* lambda_n, double* beta);
MI_API mi_status mi_simulate(const mi_problem* p, const double* v0, double h,
                             size_t n_max, mi_sampler sampler, uint64_t seed,
                             mi_trajectory** out);
MI_API mi_status mi_anitescu_resolve(const mi_problem* p, const double* v,
                                     double* v_plus);
MI_API mi_status mi_sequential_resolve(const mi_problem* p, const double* v,
                                       const int* order, size_t order_len,
                                       size_t iteration_cap, mi_trajectory** out);
MI_API mi_status mi_compute_r(const mi_problem* p, double* r);
MI_API mi_status mi_termination_constant(const mi_problem* p, double h,
                                         long long* c, double* r);

MI_API void mi_trajectory_destroy(mi_trajectory* t);
MI_API size_t mi_trajectory_num_steps(const mi_trajectory* t);
MI_API int mi_trajectory_terminated(const mi_trajectory* t);
MI_API mi_status mi_trajectory_step(const mi_trajectory* t, size_t k,
                                    double* lambda_max, double* lambda_n,
                                    double* beta, double* v_after, double* energy);
MI_API mi_status mi_trajectory_final_velocity(const mi_trajectory* t, double* out);
/* meta_json: optional JSON object of string fields recorded in the output. */
MI_API mi_status mi_trajectory_write(const mi_trajectory* t, const mi_problem* p,
                                     const char* path, mi_format format,
                                     const char* scene_name, const char* meta_json);

/* Set approximation */
MI_API mi_status mi_psi(const mi_problem* p, double* out);
MI_API mi_status mi_approximate(const mi_problem* p, const double* v0,
                                const mi_approx_params* params, mi_set** out);
MI_API void mi_set_destroy(mi_set* s);
MI_API size_t mi_set_size(const mi_set* s);
MI_API size_t mi_set_rejected(const mi_set* s);
MI_API mi_status mi_set_sample(const mi_set* s, size_t k, double* v);
MI_API mi_status mi_set_write(const mi_set* s, const mi_problem* p, const char* path,
                              mi_format format, const char* scene_name,
                              const char* meta_json);
/* JSON summary: sample and rejected counts plus per-contact and joint
 * stick/slide/lift histograms at tolerance tol. */
MI_API mi_status mi_set_summary_json(const mi_set* s, const mi_problem* p, double tol,
                                     char* buf, size_t cap, size_t* needed);
MI_API mi_status mi_sample_count_bound(double h, double lipschitz_l, int64_t box_dim,
                                       double epsilon, double delta, int64_t* out);
MI_API mi_status mi_epsilon_net_check(const double* candidate, size_t n_candidate,
                                      const double* reference, size_t n_reference,
                                      size_t dim, double epsilon, int* ok,
                                      double* worst_gap);

/* Method comparison */
MI_API mi_status mi_compare(const mi_problem* p, const double* v0,
                            const mi_approx_params* params, mi_comparison** out);
MI_API void mi_comparison_destroy(mi_comparison* c);
MI_API size_t mi_comparison_size(const mi_comparison* c);
MI_API mi_status mi_comparison_row(const mi_comparison* c, size_t k, char* method,
                                   size_t cap, size_t* needed, double* v);
MI_API mi_status mi_comparison_write(const mi_comparison* c, const mi_problem* p,
                                     const char* path, mi_format format,
                                     const char* scene_name, const char* meta_json);

/* Reference oracles */
MI_API mi_status mi_routh_dense(const mi_problem* p, const double* v0, double ds,
                                mi_dense** out);
MI_API void mi_dense_destroy(mi_dense* d);
MI_API size_t mi_dense_size(const mi_dense* d);
MI_API mi_status mi_dense_point(const mi_dense* d, size_t k, double* s, double* v);
MI_API mi_status mi_dense_write(const mi_dense* d, const mi_problem* p,
                                const char* path, mi_format format,
                                const char* scene_name, const char* meta_json);

/* LCP. z has length n; status receives 0 solved, 1 ray, 2 max pivots. */
MI_API mi_status mi_lemke_solve(int n, const double* M, const double* q, double* z,
                                int* pivots, int* status);

#ifdef __cplusplus
}
#endif

#endif /* MULTIMPACT_H */
