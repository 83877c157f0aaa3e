#include "multimpact/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "multimpact/error.hpp"

namespace multimpact {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json number_to_json(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  fail(ErrorCode::kParse, "expected a number, got " + j.dump());
}

json vector_to_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_to_json(v[i]));
  return out;
}

VectorXd vector_from_json(const json& j) {
  require(j.is_array(), ErrorCode::kParse, "expected an array of numbers");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number_from_json(j[i]);
  return v;
}

json matrix_to_json(const MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r)));
  return out;
}

MatrixXd matrix_from_json(const json& j) {
  require(j.is_array(), ErrorCode::kParse, "expected an array of rows");
  if (j.empty()) return MatrixXd(0, 0);
  const auto cols = j[0].size();
  MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const VectorXd row = vector_from_json(j[r]);
    require(static_cast<std::size_t>(row.size()) == cols, ErrorCode::kParse,
            "matrix rows have different lengths");
    m.row(r) = row;
  }
  return m;
}

namespace {

template <typename F>
auto parse_guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, e.what());
  }
}

json meta_to_json(const ExportMeta& meta) {
  json out = json::object();
  for (const auto& [k, v] : meta.fields) out[k] = v;
  return out;
}

void write_meta(std::ostream& os, const ExportMeta& meta) {
  os << kFormatHeader << '\n';
  os << "# scene=" << meta.scene << '\n';
  for (const auto& [k, v] : meta.fields) os << "# " << k << '=' << v << '\n';
}

void write_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

void append(std::vector<std::string>& row, const VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(format_double(v[i]));
}

std::vector<std::string> velocity_columns(const ImpactProblem& p) {
  std::vector<std::string> cols;
  for (int k = 0; k < p.num_velocities(); ++k) cols.push_back("v_" + std::to_string(k));
  return cols;
}

std::vector<std::string> projection_columns(const ImpactProblem& p) {
  std::vector<std::string> cols;
  for (const auto& l : p.labels()) cols.push_back("vn_" + l);
  for (const auto& l : p.labels()) cols.push_back("vt_" + l);
  return cols;
}

void append_projections(std::vector<std::string>& row, const ImpactProblem& p,
                        const VelocityState& v) {
  append(row, p.jn() * v);
  append(row, p.jt() * v);
}

json projections_json(const ImpactProblem& p, const VelocityState& v) {
  return json{{"vn", vector_to_json(p.jn() * v)}, {"vt", vector_to_json(p.jt() * v)}};
}

json header_json(const char* kind, const ImpactProblem& p, const ExportMeta& meta) {
  return json{{"format", "multimpact-format v1"},
              {"kind", kind},
              {"scene", meta.scene},
              {"meta", meta_to_json(meta)},
              {"labels", p.labels()}};
}

}  // namespace

json problem_to_json(const ImpactProblem& p) {
  return json{{"mass", matrix_to_json(p.mass())},
              {"jn", matrix_to_json(p.jn())},
              {"jd", matrix_to_json(p.jd())},
              {"mu", vector_to_json(p.mu())},
              {"labels", p.labels()}};
}

ImpactProblem problem_from_json(const json& j) {
  return parse_guard([&] {
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return ImpactProblem(matrix_from_json(j.at("mass")), matrix_from_json(j.at("jn")),
                         matrix_from_json(j.at("jd")), vector_from_json(j.at("mu")),
                         labels);
  });
}

json lcp_debug_json(const LcpInstance& lcp, const LcpSolution* sol) {
  json out{{"M", matrix_to_json(lcp.M)}, {"q", vector_to_json(lcp.q)}};
  if (sol) {
    out["z"] = vector_to_json(sol->z);
    out["w"] = vector_to_json(sol->w);
    out["status"] = lcp_status_name(sol->status);
    out["pivots"] = sol->pivot_count;
  }
  return out;
}

json scene_to_json(const Scene& scene) {
  json out;
  out["format"] = kSceneFormat;
  out["name"] = scene.name;
  out["model"] = scene.model == ModelKind::kCompassGait ? "compass_gait" : "rigid_bodies";
  if (scene.model == ModelKind::kCompassGait) {
    const auto& g = scene.compass;
    out["compass"] = json{{"leg_length", g.leg_length},
                          {"mass_to_foot", g.mass_to_foot},
                          {"leg_mass", g.leg_mass},
                          {"hip", {g.hip_x, g.hip_y}},
                          {"pitch_trailing", g.pitch_trailing},
                          {"pitch_leading", g.pitch_leading}};
  } else {
    json bodies = json::array();
    for (const auto& b : scene.bodies) {
      json shape;
      if (const auto* poly = std::get_if<PolygonShape>(&b.shape)) {
        json verts = json::array();
        for (const auto& v : poly->vertices) verts.push_back({v.x(), v.y()});
        shape = json{{"type", "polygon"}, {"vertices", verts}};
      } else {
        shape = json{{"type", "disk"}, {"radius", std::get<DiskShape>(b.shape).radius}};
      }
      bodies.push_back(json{{"name", b.name},
                            {"mass", b.mass},
                            {"inertia", b.inertia},
                            {"shape", shape},
                            {"pose", {b.pose.x, b.pose.y, b.pose.theta}}});
    }
    out["bodies"] = bodies;
  }
  json env = json::array();
  for (const auto& hp : scene.environment) {
    env.push_back(json{{"name", hp.name},
                       {"point", {hp.point.x(), hp.point.y()}},
                       {"normal", {hp.normal.x(), hp.normal.y()}}});
  }
  out["environment"] = env;
  json contacts = json::array();
  for (const auto& c : scene.contacts) {
    json jc{{"label", c.label}, {"mu", c.mu}, {"kind", contact_kind_name(c.kind)},
            {"body", c.body}, {"other", c.other}};
    if (c.kind == ContactKind::kVertexEnv) jc["vertex"] = c.vertex;
    contacts.push_back(jc);
  }
  out["contacts"] = contacts;
  out["v0"] = vector_to_json(scene.v0);
  out["defaults"] = json{{"h", scene.defaults.h},
                         {"N", scene.defaults.n},
                         {"M", scene.defaults.m_paper}};
  if (scene.mirror_body_map) out["mirror_body_map"] = *scene.mirror_body_map;
  return out;
}

Scene scene_from_json(const json& j) {
  Scene s = parse_guard([&] {
    Scene s;
    require(j.value("format", std::string()) == kSceneFormat, ErrorCode::kParse,
            std::string("scene file must declare format '") + kSceneFormat + "'");
    s.name = j.at("name").get<std::string>();
    const auto model = j.at("model").get<std::string>();
    if (model == "compass_gait") {
      s.model = ModelKind::kCompassGait;
      const json& g = j.at("compass");
      s.compass.leg_length = g.at("leg_length").get<double>();
      s.compass.mass_to_foot = g.at("mass_to_foot").get<double>();
      s.compass.leg_mass = g.at("leg_mass").get<double>();
      s.compass.hip_x = g.at("hip").at(0).get<double>();
      s.compass.hip_y = g.at("hip").at(1).get<double>();
      s.compass.pitch_trailing = g.at("pitch_trailing").get<double>();
      s.compass.pitch_leading = g.at("pitch_leading").get<double>();
    } else if (model == "rigid_bodies") {
      for (const json& jb : j.at("bodies")) {
        PlanarBody b;
        b.name = jb.value("name", std::string());
        b.mass = jb.at("mass").get<double>();
        b.inertia = jb.at("inertia").get<double>();
        const json& sh = jb.at("shape");
        const auto type = sh.at("type").get<std::string>();
        if (type == "polygon") {
          PolygonShape poly;
          for (const json& v : sh.at("vertices")) {
            poly.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
          }
          b.shape = poly;
        } else if (type == "disk") {
          b.shape = DiskShape{sh.at("radius").get<double>()};
        } else {
          fail(ErrorCode::kParse, "unknown shape type '" + type + "'");
        }
        const json& pose = jb.at("pose");
        b.pose = Pose{pose.at(0).get<double>(), pose.at(1).get<double>(),
                      pose.at(2).get<double>()};
        s.bodies.push_back(std::move(b));
      }
    } else {
      fail(ErrorCode::kParse, "unknown model '" + model + "'");
    }
    for (const json& je : j.at("environment")) {
      HalfPlane hp;
      hp.name = je.value("name", std::string());
      hp.point = {je.at("point").at(0).get<double>(), je.at("point").at(1).get<double>()};
      hp.normal = {je.at("normal").at(0).get<double>(), je.at("normal").at(1).get<double>()};
      s.environment.push_back(hp);
    }
    for (const json& jc : j.at("contacts")) {
      ContactSpec c;
      c.label = jc.at("label").get<std::string>();
      c.mu = jc.at("mu").get<double>();
      c.kind = parse_contact_kind(jc.at("kind").get<std::string>());
      c.body = jc.at("body").get<int>();
      c.other = jc.value("other", 0);
      c.vertex = jc.value("vertex", -1);
      s.contacts.push_back(c);
    }
    s.v0 = vector_from_json(j.at("v0"));
    const json& d = j.at("defaults");
    s.defaults.h = d.at("h").get<double>();
    s.defaults.n = d.at("N").get<std::size_t>();
    s.defaults.m_paper = d.at("M").get<std::size_t>();
    if (j.contains("mirror_body_map")) {
      s.mirror_body_map = j.at("mirror_body_map").get<std::vector<int>>();
    }
    return s;
  });
  s.validate();
  return s;
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open scene file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, "scene file '" + path + "': " + e.what());
  }
  return scene_from_json(j);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t,
                          const ImpactProblem& p, const ExportMeta& meta) {
  write_meta(os, meta);
  os << "# h=" << format_double(t.h) << " rng_seed=" << t.rng_seed
     << " sampler=" << t.sampler << " terminated=" << (t.terminated ? "true" : "false")
     << '\n';
  std::vector<std::string> cols{"step"};
  for (const auto& l : p.labels()) cols.push_back("lambda_max_" + l);
  for (const auto& l : p.labels()) cols.push_back("lambda_n_" + l);
  for (const auto& l : p.labels()) {
    cols.push_back("beta_" + l + "+");
    cols.push_back("beta_" + l + "-");
  }
  for (const auto& c : velocity_columns(p)) cols.push_back(c);
  cols.push_back("energy");
  write_row(os, cols);
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const StepRecord& s = t.steps[k];
    std::vector<std::string> row{std::to_string(k + 1)};
    append(row, s.lambda_max);
    append(row, s.lambda_n);
    append(row, s.beta);
    append(row, s.v_after);
    row.push_back(format_double(s.energy_after));
    write_row(os, row);
  }
}

json trajectory_to_json(const Trajectory& t, const ImpactProblem& p,
                        const ExportMeta& meta) {
  json out = header_json("trajectory", p, meta);
  out["h"] = number_to_json(t.h);
  out["rng_seed"] = t.rng_seed;
  out["sampler"] = t.sampler;
  out["terminated"] = t.terminated;
  out["v0"] = vector_to_json(t.v0);
  json steps = json::array();
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const StepRecord& s = t.steps[k];
    steps.push_back(json{{"step", k + 1},
                         {"lambda_max", vector_to_json(s.lambda_max)},
                         {"lambda_n", vector_to_json(s.lambda_n)},
                         {"beta", vector_to_json(s.beta)},
                         {"v_after", vector_to_json(s.v_after)},
                         {"energy", number_to_json(s.energy_after)}});
  }
  out["steps"] = steps;
  return out;
}

void write_set_csv(std::ostream& os, const PostImpactSet& set, const ImpactProblem& p,
                   const ExportMeta& meta) {
  write_meta(os, meta);
  os << "# samples=" << set.samples.size() << " rejected=" << set.rejected_count
     << " psi=" << format_double(set.psi) << '\n';
  std::vector<std::string> cols{"index"};
  for (const auto& c : velocity_columns(p)) cols.push_back(c);
  for (const auto& c : projection_columns(p)) cols.push_back(c);
  write_row(os, cols);
  for (std::size_t k = 0; k < set.samples.size(); ++k) {
    std::vector<std::string> row{std::to_string(set.trajectory_index[k])};
    append(row, set.samples[k]);
    append_projections(row, p, set.samples[k]);
    write_row(os, row);
  }
}

json set_to_json(const PostImpactSet& set, const ImpactProblem& p,
                 const ExportMeta& meta) {
  json out = header_json("post_impact_set", p, meta);
  const auto& prm = set.params;
  out["params"] = json{{"h", prm.h},
                       {"epsilon", prm.epsilon},
                       {"N", prm.n_traj_len},
                       {"M", prm.m_traj_count},
                       {"seed", prm.seed},
                       {"sampler", sampler_kind_name(prm.sampler)}};
  out["psi"] = set.psi;
  out["rejected_count"] = set.rejected_count;
  json samples = json::array();
  for (std::size_t k = 0; k < set.samples.size(); ++k) {
    json s = projections_json(p, set.samples[k]);
    s["index"] = set.trajectory_index[k];
    s["v"] = vector_to_json(set.samples[k]);
    samples.push_back(s);
  }
  out["samples"] = samples;
  return out;
}

void write_dense_csv(std::ostream& os, const DenseTrajectory& d, const ImpactProblem& p,
                     const ExportMeta& meta) {
  write_meta(os, meta);
  std::vector<std::string> cols{"step", "s"};
  for (const auto& c : velocity_columns(p)) cols.push_back(c);
  cols.push_back("energy");
  write_row(os, cols);
  for (std::size_t k = 0; k < d.s_grid.size(); ++k) {
    std::vector<std::string> row{std::to_string(k), format_double(d.s_grid[k])};
    append(row, d.v_grid[k]);
    row.push_back(format_double(kinetic_energy(p, d.v_grid[k])));
    write_row(os, row);
  }
}

json dense_to_json(const DenseTrajectory& d, const ImpactProblem& p,
                   const ExportMeta& meta) {
  json out = header_json("dense_trajectory", p, meta);
  json pts = json::array();
  for (std::size_t k = 0; k < d.s_grid.size(); ++k) {
    pts.push_back(json{{"step", k},
                       {"s", d.s_grid[k]},
                       {"v", vector_to_json(d.v_grid[k])},
                       {"energy", kinetic_energy(p, d.v_grid[k])}});
  }
  out["points"] = pts;
  return out;
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows,
                       const ImpactProblem& p, const ExportMeta& meta) {
  write_meta(os, meta);
  std::vector<std::string> cols{"method", "index"};
  for (const auto& c : velocity_columns(p)) cols.push_back(c);
  for (const auto& c : projection_columns(p)) cols.push_back(c);
  write_row(os, cols);
  for (const auto& r : rows) {
    std::vector<std::string> row{r.method, std::to_string(r.index)};
    append(row, r.v);
    append_projections(row, p, r.v);
    write_row(os, row);
  }
}

json compare_to_json(const std::vector<CompareRow>& rows, const ImpactProblem& p,
                     const ExportMeta& meta) {
  json out = header_json("compare", p, meta);
  json arr = json::array();
  for (const auto& r : rows) {
    json s = projections_json(p, r.v);
    s["method"] = r.method;
    s["index"] = r.index;
    s["v"] = vector_to_json(r.v);
    arr.push_back(s);
  }
  out["rows"] = arr;
  return out;
}

}  // namespace multimpact
