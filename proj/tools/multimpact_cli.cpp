// multimpact command-line front end. Talks to the engine only through the
// C interface in multimpact.h.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "multimpact/multimpact.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;
constexpr std::size_t kDeskScaleM = std::size_t{1} << 12;

// Carries an exit code to main.
struct Failure {
  int code;
  std::string message;
};

int exit_code_for(mi_status st) {
  switch (st) {
    case MI_ERR_IO: return kExitIo;
    case MI_ERR_SOLVER:
    case MI_ERR_CONE_VIOLATION:
    case MI_ERR_NON_DEGENERACY:
    case MI_ERR_ITERATION_CAP:
    case MI_ERR_BUDGET:
    case MI_ERR_INTERNAL: return kExitSolver;
    default: return kExitConfig;
  }
}

void check(mi_status st, const char* what) {
  if (st == MI_OK) return;
  throw Failure{exit_code_for(st),
                std::string(what) + ": " + mi_status_name(st) + ": " + mi_last_error()};
}

[[noreturn]] void config_error(const std::string& msg) {
  throw Failure{kExitConfig, msg};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename F>
std::string read_text(F&& call, const char* what) {
  std::size_t needed = 0;
  mi_status st = call(nullptr, 0, &needed);
  if (st != MI_ERR_BUFFER_TOO_SMALL) check(st, what);
  std::string buf(needed, '\0');
  check(call(buf.data(), buf.size(), &needed), what);
  buf.resize(needed ? needed - 1 : 0);
  return buf;
}

using SceneHandle = std::unique_ptr<mi_scene, decltype(&mi_scene_destroy)>;
using ProblemHandle = std::unique_ptr<mi_problem, decltype(&mi_problem_destroy)>;

struct Options {
  std::string scene = "phone";
  std::string output = "/dev/stdout";
  std::string format;
  std::string sampler = "sobol";
  std::string contact;
  double h = NAN;
  double epsilon = NAN;
  double ds = NAN;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  int jobs = 0;
  bool paper_scale = false;
};

struct Loaded {
  SceneHandle scene{nullptr, mi_scene_destroy};
  ProblemHandle problem{nullptr, mi_problem_destroy};
  std::string name;
  std::vector<double> v0;
  double h = 0.0;
  std::size_t n = 0;
  std::size_t m_paper = 0;
};

bool is_builtin(const std::string& s) {
  return s == "phone" || s == "compass" || s == "box_wall" || s == "disk_stack";
}

Loaded load(const Options& o) {
  Loaded l;
  mi_scene* s = nullptr;
  if (is_builtin(o.scene)) {
    check(mi_scene_builtin(o.scene.c_str(), &s), "scene");
  } else {
    const mi_status st = mi_scene_load_file(o.scene.c_str(), &s);
    if (st == MI_ERR_IO) {
      throw Failure{kExitConfig, "scene: '" + o.scene +
                                     "' is neither a builtin scene nor a readable file"};
    }
    check(st, "scene");
  }
  l.scene.reset(s);
  mi_problem* p = nullptr;
  check(mi_scene_problem(s, &p), "scene");
  l.problem.reset(p);
  l.name = read_text(
      [&](char* b, std::size_t c, std::size_t* n) { return mi_scene_name(s, b, c, n); },
      "scene");
  l.v0.resize(mi_problem_num_velocities(p));
  check(mi_scene_v0(s, l.v0.data(), l.v0.size()), "scene");
  check(mi_scene_defaults(s, &l.h, &l.n, &l.m_paper), "scene");
  return l;
}

mi_format parse_format(const Options& o) {
  std::string f = o.format;
  if (f.empty()) {
    const auto dot = o.output.rfind('.');
    f = (dot != std::string::npos && o.output.substr(dot) == ".json") ? "json" : "csv";
  }
  if (f == "csv") return MI_FORMAT_CSV;
  if (f == "json") return MI_FORMAT_JSON;
  config_error("format must be csv or json, got '" + f + "'");
}

mi_sampler parse_sampler(const std::string& s) {
  if (s == "sobol") return MI_SAMPLER_SOBOL;
  if (s == "uniform") return MI_SAMPLER_UNIFORM;
  config_error("sampler must be sobol or uniform, got '" + s + "'");
}

mi_approx_params approx_params(const Options& o, const Loaded& l) {
  mi_approx_params prm{};
  prm.h = std::isnan(o.h) ? l.h : o.h;
  prm.epsilon = std::isnan(o.epsilon) ? prm.h / 10.0 : o.epsilon;
  prm.n = o.n ? o.n : l.n;
  prm.m = o.m ? o.m : (o.paper_scale ? l.m_paper : kDeskScaleM);
  prm.seed = o.seed;
  prm.sampler = parse_sampler(o.sampler);
  prm.jobs = o.jobs > 0 ? o.jobs
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (!(prm.h > 0.0)) config_error("h must be positive");
  if (!(prm.epsilon > 0.0 && prm.epsilon < prm.h)) {
    config_error("epsilon must lie in (0, h); got epsilon=" + fmt(prm.epsilon) +
                 " h=" + fmt(prm.h));
  }
  return prm;
}

std::string meta_json(const std::string& command, const mi_approx_params& prm,
                      bool with_set) {
  nlohmann::json j{{"command", command},
                   {"h", fmt(prm.h)},
                   {"seed", std::to_string(prm.seed)},
                   {"sampler", prm.sampler == MI_SAMPLER_UNIFORM ? "uniform" : "sobol"},
                   {"N", std::to_string(prm.n)}};
  if (with_set) {
    j["epsilon"] = fmt(prm.epsilon);
    j["M"] = std::to_string(prm.m);
  }
  return j.dump();
}

int run_simulate(const Options& o) {
  Loaded l = load(o);
  mi_approx_params prm{};
  prm.h = std::isnan(o.h) ? l.h : o.h;
  prm.n = o.n ? o.n : l.n;
  prm.seed = o.seed;
  prm.sampler = parse_sampler(o.sampler);
  if (!(prm.h > 0.0)) config_error("h must be positive");
  const mi_format format = parse_format(o);
  mi_trajectory* t = nullptr;
  check(mi_simulate(l.problem.get(), l.v0.data(), prm.h, prm.n, prm.sampler, prm.seed, &t),
        "simulate");
  std::unique_ptr<mi_trajectory, decltype(&mi_trajectory_destroy)> guard(
      t, mi_trajectory_destroy);
  check(mi_trajectory_write(t, l.problem.get(), o.output.c_str(), format, l.name.c_str(),
                            meta_json("simulate", prm, false).c_str()),
        "write");
  return 0;
}

int run_approximate(const Options& o) {
  Loaded l = load(o);
  const mi_approx_params prm = approx_params(o, l);
  const mi_format format = parse_format(o);
  mi_set* s = nullptr;
  check(mi_approximate(l.problem.get(), l.v0.data(), &prm, &s), "approximate");
  std::unique_ptr<mi_set, decltype(&mi_set_destroy)> guard(s, mi_set_destroy);
  check(mi_set_write(s, l.problem.get(), o.output.c_str(), format, l.name.c_str(),
                     meta_json("approximate", prm, true).c_str()),
        "write");
  const std::string summary = read_text(
      [&](char* b, std::size_t c, std::size_t* n) {
        return mi_set_summary_json(s, l.problem.get(), 1e-6, b, c, n);
      },
      "summary");
  (o.output == "/dev/stdout" ? std::cerr : std::cout) << summary;
  return 0;
}

int run_compare(const Options& o) {
  Loaded l = load(o);
  const mi_approx_params prm = approx_params(o, l);
  const mi_format format = parse_format(o);
  mi_comparison* c = nullptr;
  check(mi_compare(l.problem.get(), l.v0.data(), &prm, &c), "compare");
  std::unique_ptr<mi_comparison, decltype(&mi_comparison_destroy)> guard(
      c, mi_comparison_destroy);
  check(mi_comparison_write(c, l.problem.get(), o.output.c_str(), format, l.name.c_str(),
                            meta_json("compare", prm, true).c_str()),
        "write");
  return 0;
}

int run_oracle(const Options& o) {
  Loaded l = load(o);
  const mi_format format = parse_format(o);
  int contact = 0;
  if (!o.contact.empty()) {
    check(mi_problem_contact_index(l.problem.get(), o.contact.c_str(), &contact),
          "oracle");
  } else {
    // First contact that is approaching at v0.
    const int m = mi_problem_num_contacts(l.problem.get());
    contact = -1;
    for (int i = 0; i < m && contact < 0; ++i) {
      mi_problem* single = nullptr;
      check(mi_problem_restrict(l.problem.get(), &i, 1, &single), "oracle");
      int hit = 0;
      const mi_status st = mi_is_impacting(single, l.v0.data(), 1e-10, &hit);
      mi_problem_destroy(single);
      check(st, "oracle");
      if (hit) contact = i;
    }
    if (contact < 0) config_error("oracle: no contact is approaching at v0");
  }
  mi_problem* single = nullptr;
  check(mi_problem_restrict(l.problem.get(), &contact, 1, &single), "oracle");
  ProblemHandle sp(single, mi_problem_destroy);
  const double h = std::isnan(o.h) ? l.h : o.h;
  const double ds = std::isnan(o.ds) ? 1e-4 * h : o.ds;
  if (!(ds > 0.0)) config_error("ds must be positive");
  mi_dense* d = nullptr;
  check(mi_routh_dense(single, l.v0.data(), ds, &d), "oracle");
  std::unique_ptr<mi_dense, decltype(&mi_dense_destroy)> guard(d, mi_dense_destroy);
  const nlohmann::json meta{{"command", "oracle"}, {"ds", fmt(ds)}};
  check(mi_dense_write(d, single, o.output.c_str(), format, l.name.c_str(),
                       meta.dump().c_str()),
        "write");
  return 0;
}

int run_example(const Options& o) {
  Loaded l = load(o);
  const std::string text = read_text(
      [&](char* b, std::size_t c, std::size_t* n) {
        return mi_scene_to_json(l.scene.get(), b, c, n);
      },
      "example");
  if (o.output == "/dev/stdout") {
    std::cout << text;
    return 0;
  }
  std::FILE* f = std::fopen(o.output.c_str(), "wb");
  if (!f) throw Failure{kExitIo, "cannot open '" + o.output + "' for writing"};
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok) throw Failure{kExitIo, "write to '" + o.output + "' failed"};
  return 0;
}

void add_scene(CLI::App* cmd, Options& o) {
  cmd->add_option("--scene", o.scene,
                  "Builtin scene (phone, compass, box_wall, disk_stack) or scene JSON path");
  cmd->add_option("-o,--output", o.output, "Output file (default: standard output)");
}

void add_format(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "csv or json (default: from output extension)");
}

void add_run(CLI::App* cmd, Options& o) {
  cmd->add_option("--h", o.h, "Impulse step scale h [N s] (default: scene value)");
  cmd->add_option("--n", o.n, "Steps per trajectory N (default: scene value)");
  cmd->add_option("--seed", o.seed, "Sampler seed");
  cmd->add_option("--sampler", o.sampler, "sobol or uniform");
}

void add_set(CLI::App* cmd, Options& o) {
  cmd->add_option("--epsilon", o.epsilon, "Net radius epsilon, 0 < epsilon < h (default h/10)");
  cmd->add_option("--m", o.m, "Trajectory count M (default 4096)");
  cmd->add_option("--jobs", o.jobs, "Worker threads (default: available cores)");
  cmd->add_flag("--paper-scale", o.paper_scale, "Use the scene's published trajectory count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous frictional impact resolution"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "Run one stochastic impact trajectory");
  add_scene(simulate, o);
  add_format(simulate, o);
  add_run(simulate, o);

  auto* approximate = app.add_subcommand("approximate", "Sample the post-impact velocity set");
  add_scene(approximate, o);
  add_format(approximate, o);
  add_run(approximate, o);
  add_set(approximate, o);

  auto* compare = app.add_subcommand(
      "compare", "Sampled set plus simultaneous and sequential baselines");
  add_scene(compare, o);
  add_format(compare, o);
  add_run(compare, o);
  add_set(compare, o);

  auto* oracle = app.add_subcommand("oracle", "Dense single-contact reference integration");
  add_scene(oracle, o);
  add_format(oracle, o);
  oracle->add_option("--contact", o.contact, "Contact label (default: first approaching)");
  oracle->add_option("--ds", o.ds, "Impulse increment (default 1e-4 h)");
  oracle->add_option("--h", o.h, "Scale for the default ds");

  auto* example = app.add_subcommand("example", "Print a builtin scene as JSON");
  add_scene(example, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*simulate) return run_simulate(o);
    if (*approximate) return run_approximate(o);
    if (*compare) return run_compare(o);
    if (*oracle) return run_oracle(o);
    if (*example) return run_example(o);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  }
  return kExitConfig;
}
