#include "multimpact/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "multimpact/error.hpp"

namespace multimpact {

namespace {

using Eigen::Vector2d;

constexpr double kDeg = std::numbers::pi / 180.0;

Vector2d rotate(double theta, const Vector2d& x) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * x.x() - s * x.y(), s * x.x() + c * x.y()};
}

// Counter-clockwise quarter turn.
Vector2d perp(const Vector2d& x) { return {-x.y(), x.x()}; }

// Tangent paired with a unit normal; (1, 0) on a floor with normal (0, 1).
Vector2d tangent_of(const Vector2d& n) { return {n.y(), -n.x()}; }

Vector2d body_center(const VectorXd& q, int b) { return {q[3 * b], q[3 * b + 1]}; }

double disk_radius(const PlanarBody& body) {
  const auto* d = std::get_if<DiskShape>(&body.shape);
  require(d != nullptr, ErrorCode::kUnsupported,
          "contact kind needs a disk but body '" + body.name + "' is a polygon");
  return d->radius;
}

Vector2d vertex_world(const PlanarBody& body, int vertex, const VectorXd& q, int b) {
  const auto* poly = std::get_if<PolygonShape>(&body.shape);
  require(poly != nullptr, ErrorCode::kUnsupported,
          "vertex contact on non-polygon body '" + body.name + "'");
  return body_center(q, b) + rotate(q[3 * b + 2], poly->vertices.at(vertex));
}

Vector2d unit_normal(const HalfPlane& hp) {
  const double n = hp.normal.norm();
  require(n > 0.0, ErrorCode::kInvalidArgument,
          "half-plane '" + hp.name + "' has a zero normal");
  return hp.normal / n;
}

Vector2d foot_world(const CompassGait& g, const VectorXd& q, int leg) {
  const double phi = q[2 + leg];
  return Vector2d(q[0], q[1]) + g.leg_length * Vector2d(std::sin(phi), -std::cos(phi));
}

void check_q(const Scene& scene, const VectorXd& q) {
  require(q.size() == num_dofs(scene), ErrorCode::kDimensionMismatch,
          "configuration length differs from scene degrees of freedom");
}

// Writes the velocity-Jacobian row of a point attached to body b for
// direction `dir`, scaled by `sign`.
void point_row(MatrixXd& J, int row, int b, const Vector2d& dir,
               const Vector2d& arm, double sign) {
  J(row, 3 * b) += sign * dir.x();
  J(row, 3 * b + 1) += sign * dir.y();
  J(row, 3 * b + 2) += sign * dir.dot(perp(arm));
}

}  // namespace

const char* contact_kind_name(ContactKind kind) {
  switch (kind) {
    case ContactKind::kVertexEnv: return "vertex_env";
    case ContactKind::kDiskEnv: return "disk_env";
    case ContactKind::kDiskDisk: return "disk_disk";
    case ContactKind::kFootEnv: return "foot_env";
  }
  return "unknown";
}

ContactKind parse_contact_kind(const std::string& name) {
  for (auto k : {ContactKind::kVertexEnv, ContactKind::kDiskEnv,
                 ContactKind::kDiskDisk, ContactKind::kFootEnv}) {
    if (name == contact_kind_name(k)) return k;
  }
  fail(ErrorCode::kParse, "unknown contact kind '" + name + "'");
}

void Scene::validate() const {
  const int nb = static_cast<int>(bodies.size());
  const int ne = static_cast<int>(environment.size());
  if (model == ModelKind::kRigidBodies) {
    require(nb >= 1, ErrorCode::kInvalidArgument, "scene has no bodies");
    for (const auto& b : bodies) {
      require(b.mass > 0.0 && b.inertia > 0.0, ErrorCode::kInvalidArgument,
              "body '" + b.name + "' needs positive mass and inertia");
      if (const auto* poly = std::get_if<PolygonShape>(&b.shape)) {
        require(poly->vertices.size() >= 3, ErrorCode::kInvalidArgument,
                "polygon '" + b.name + "' needs at least three vertices");
        double area2 = 0.0;
        const auto& v = poly->vertices;
        for (std::size_t i = 0; i < v.size(); ++i) {
          const auto& a = v[i];
          const auto& c = v[(i + 1) % v.size()];
          area2 += a.x() * c.y() - a.y() * c.x();
        }
        require(area2 > 0.0, ErrorCode::kInvalidArgument,
                "polygon '" + b.name + "' vertices are not counter-clockwise");
      } else {
        require(std::get<DiskShape>(b.shape).radius > 0.0,
                ErrorCode::kInvalidArgument,
                "disk '" + b.name + "' needs a positive radius");
      }
    }
  } else {
    require(compass.leg_length > 0.0 && compass.leg_mass > 0.0 &&
                compass.mass_to_foot >= 0.0 &&
                compass.mass_to_foot < compass.leg_length,
            ErrorCode::kInvalidArgument, "compass-gait parameters out of range");
  }
  for (const auto& hp : environment) unit_normal(hp);
  require(!contacts.empty(), ErrorCode::kInvalidArgument, "scene has no contacts");
  for (const auto& c : contacts) {
    require(c.mu > 0.0, ErrorCode::kInvalidArgument,
            "contact '" + c.label + "' needs positive friction");
    const bool compass_kind = c.kind == ContactKind::kFootEnv;
    require(compass_kind == (model == ModelKind::kCompassGait),
            ErrorCode::kInvalidArgument,
            "contact '" + c.label + "' kind does not fit the scene model");
    if (compass_kind) {
      require(c.body == 0 || c.body == 1, ErrorCode::kInvalidArgument,
              "foot contact '" + c.label + "' must name leg 0 or 1");
    } else {
      require(c.body >= 0 && c.body < nb, ErrorCode::kInvalidArgument,
              "contact '" + c.label + "' references a missing body");
    }
    if (c.kind == ContactKind::kDiskDisk) {
      require(c.other >= 0 && c.other < nb && c.other != c.body,
              ErrorCode::kInvalidArgument,
              "contact '" + c.label + "' references a missing second body");
      disk_radius(bodies[c.body]);
      disk_radius(bodies[c.other]);
    } else {
      require(c.other >= 0 && c.other < ne, ErrorCode::kInvalidArgument,
              "contact '" + c.label + "' references a missing half-plane");
    }
    if (c.kind == ContactKind::kVertexEnv) {
      const auto* poly = std::get_if<PolygonShape>(&bodies[c.body].shape);
      require(poly != nullptr && c.vertex >= 0 &&
                  c.vertex < static_cast<int>(poly->vertices.size()),
              ErrorCode::kInvalidArgument,
              "contact '" + c.label + "' references a missing vertex");
    }
    if (c.kind == ContactKind::kDiskEnv) disk_radius(bodies[c.body]);
  }
  require(v0.size() == num_dofs(*this), ErrorCode::kDimensionMismatch,
          "v0 length differs from scene degrees of freedom");
  require(defaults.h > 0.0 && defaults.n >= 1 && defaults.m_paper >= 1,
          ErrorCode::kInvalidArgument, "scene defaults out of range");
  if (mirror_body_map) {
    const auto& map = *mirror_body_map;
    require(model == ModelKind::kRigidBodies &&
                static_cast<int>(map.size()) == nb,
            ErrorCode::kInvalidArgument, "mirror map must cover every body");
    for (int k = 0; k < nb; ++k) {
      require(map[k] >= 0 && map[k] < nb && map[map[k]] == k,
              ErrorCode::kInvalidArgument, "mirror map is not an involution");
    }
  }
}

int num_dofs(const Scene& scene) {
  return scene.model == ModelKind::kCompassGait
             ? 4
             : 3 * static_cast<int>(scene.bodies.size());
}

VectorXd configuration(const Scene& scene) {
  VectorXd q(num_dofs(scene));
  if (scene.model == ModelKind::kCompassGait) {
    const auto& g = scene.compass;
    q << g.hip_x, g.hip_y, g.pitch_trailing, g.pitch_leading;
    return q;
  }
  for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
    const Pose& p = scene.bodies[b].pose;
    q.segment<3>(3 * b) << p.x, p.y, p.theta;
  }
  return q;
}

VectorXd gap(const Scene& scene, const VectorXd& q) {
  check_q(scene, q);
  VectorXd out(scene.contacts.size());
  for (std::size_t i = 0; i < scene.contacts.size(); ++i) {
    const ContactSpec& c = scene.contacts[i];
    switch (c.kind) {
      case ContactKind::kVertexEnv: {
        const HalfPlane& hp = scene.environment.at(c.other);
        const Vector2d p = vertex_world(scene.bodies.at(c.body), c.vertex, q, c.body);
        out[i] = unit_normal(hp).dot(p - hp.point);
        break;
      }
      case ContactKind::kDiskEnv: {
        const HalfPlane& hp = scene.environment.at(c.other);
        out[i] = unit_normal(hp).dot(body_center(q, c.body) - hp.point) -
                 disk_radius(scene.bodies.at(c.body));
        break;
      }
      case ContactKind::kDiskDisk: {
        const double d = (body_center(q, c.other) - body_center(q, c.body)).norm();
        out[i] = d - disk_radius(scene.bodies.at(c.body)) -
                 disk_radius(scene.bodies.at(c.other));
        break;
      }
      case ContactKind::kFootEnv: {
        const HalfPlane& hp = scene.environment.at(c.other);
        out[i] = unit_normal(hp).dot(foot_world(scene.compass, q, c.body) - hp.point);
        break;
      }
    }
  }
  return out;
}

ContactJacobians contact_jacobians(const Scene& scene, const VectorXd& q) {
  check_q(scene, q);
  const int m = static_cast<int>(scene.contacts.size());
  const int nv = num_dofs(scene);
  ContactJacobians J{MatrixXd::Zero(m, nv), MatrixXd::Zero(m, nv)};
  for (int i = 0; i < m; ++i) {
    const ContactSpec& c = scene.contacts[i];
    switch (c.kind) {
      case ContactKind::kVertexEnv: {
        const Vector2d n = unit_normal(scene.environment.at(c.other));
        const Vector2d arm = vertex_world(scene.bodies.at(c.body), c.vertex, q, c.body) -
                             body_center(q, c.body);
        point_row(J.jn, i, c.body, n, arm, 1.0);
        point_row(J.jt, i, c.body, tangent_of(n), arm, 1.0);
        break;
      }
      case ContactKind::kDiskEnv: {
        const Vector2d n = unit_normal(scene.environment.at(c.other));
        const Vector2d arm = -disk_radius(scene.bodies.at(c.body)) * n;
        point_row(J.jn, i, c.body, n, arm, 1.0);
        point_row(J.jt, i, c.body, tangent_of(n), arm, 1.0);
        break;
      }
      case ContactKind::kDiskDisk: {
        const Vector2d d = body_center(q, c.other) - body_center(q, c.body);
        require(d.norm() > 0.0, ErrorCode::kInvalidArgument,
                "contact '" + c.label + "' has coincident disk centers");
        const Vector2d n = d / d.norm();
        const Vector2d t = tangent_of(n);
        const double ri = disk_radius(scene.bodies.at(c.body));
        const double rj = disk_radius(scene.bodies.at(c.other));
        point_row(J.jn, i, c.other, n, -rj * n, 1.0);
        point_row(J.jn, i, c.body, n, ri * n, -1.0);
        point_row(J.jt, i, c.other, t, -rj * n, 1.0);
        point_row(J.jt, i, c.body, t, ri * n, -1.0);
        break;
      }
      case ContactKind::kFootEnv: {
        const Vector2d n = unit_normal(scene.environment.at(c.other));
        const Vector2d t = tangent_of(n);
        const double phi = q[2 + c.body];
        const Vector2d dfoot =
            scene.compass.leg_length * Vector2d(std::cos(phi), std::sin(phi));
        J.jn.row(i).head<2>() = n.transpose();
        J.jt.row(i).head<2>() = t.transpose();
        J.jn(i, 2 + c.body) = n.dot(dfoot);
        J.jt(i, 2 + c.body) = t.dot(dfoot);
        break;
      }
    }
  }
  return J;
}

MatrixXd mass_matrix(const Scene& scene, const VectorXd& q) {
  check_q(scene, q);
  const int nv = num_dofs(scene);
  MatrixXd M = MatrixXd::Zero(nv, nv);
  if (scene.model == ModelKind::kCompassGait) {
    const auto& g = scene.compass;
    const double d = g.leg_length - g.mass_to_foot;
    const double m = g.leg_mass;
    M(0, 0) = M(1, 1) = 2.0 * m;
    for (int leg = 0; leg < 2; ++leg) {
      const double phi = q[2 + leg];
      const int k = 2 + leg;
      M(0, k) = M(k, 0) = m * d * std::cos(phi);
      M(1, k) = M(k, 1) = m * d * std::sin(phi);
      M(k, k) = m * d * d;
    }
    return M;
  }
  for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
    M(3 * b, 3 * b) = M(3 * b + 1, 3 * b + 1) = scene.bodies[b].mass;
    M(3 * b + 2, 3 * b + 2) = scene.bodies[b].inertia;
  }
  return M;
}

ImpactProblem build_problem(const Scene& scene) {
  scene.validate();
  const VectorXd q = configuration(scene);
  const ContactJacobians J = contact_jacobians(scene, q);
  VectorXd mu(scene.contacts.size());
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < scene.contacts.size(); ++i) {
    mu[i] = scene.contacts[i].mu;
    labels.push_back(scene.contacts[i].label);
  }
  return ImpactProblem::from_tangent(mass_matrix(scene, q), J.jn, J.jt, mu, labels);
}

namespace {

PolygonShape rectangle(double width, double height) {
  const double a = width / 2.0, b = height / 2.0;
  return PolygonShape{{{-a, -b}, {a, -b}, {a, b}, {-a, b}}};
}

HalfPlane floor_plane() { return HalfPlane{"ground", {0.0, 0.0}, {0.0, 1.0}}; }

Scene phone_scene() {
  const double a = 0.07444, b = 0.16094, m = 0.190;
  Scene s;
  s.name = "phone";
  s.bodies.push_back(PlanarBody{"phone", m, m * (a * a + b * b) / 12.0,
                                rectangle(a, b), Pose{0.0, b / 2.0, 0.0}});
  s.environment.push_back(floor_plane());
  s.contacts = {
      ContactSpec{"A", 1.0, ContactKind::kVertexEnv, 0, 0, 0},
      ContactSpec{"B", 1.0, ContactKind::kVertexEnv, 0, 1, 0},
  };
  s.v0 = VectorXd(3);
  s.v0 << 0.0, -0.1401, 0.0;
  s.defaults = SimDefaults{0.3, 10, std::size_t{1} << 14};
  s.mirror_body_map = std::vector<int>{0};
  return s;
}

Scene compass_scene() {
  Scene s;
  s.name = "compass";
  s.model = ModelKind::kCompassGait;
  auto& g = s.compass;
  g.leg_length = 1.0;
  g.mass_to_foot = 0.5;
  g.leg_mass = 1.0;
  g.pitch_trailing = 78.0 * kDeg;
  g.pitch_leading = -78.0 * kDeg;
  g.hip_x = 0.0;
  g.hip_y = g.leg_length * std::cos(g.pitch_trailing);
  s.environment.push_back(floor_plane());
  s.contacts = {
      ContactSpec{"A", 5.0, ContactKind::kFootEnv, 1, -1, 0},
      ContactSpec{"B", 5.0, ContactKind::kFootEnv, 0, -1, 0},
  };
  // Both legs swing at 0.5 rad/s about a stationary trailing foot.
  const double rate = 0.5;
  s.v0 = VectorXd(4);
  s.v0 << -g.leg_length * rate * std::cos(g.pitch_trailing),
      -g.leg_length * rate * std::sin(g.pitch_trailing), rate, rate;
  s.defaults = SimDefaults{1.0, 5, std::size_t{1} << 20};
  return s;
}

Scene box_wall_scene() {
  const double w = 1.0, m = 1.0, tilt = 10.0 * kDeg;
  Scene s;
  s.name = "box_wall";
  // Tilted counter-clockwise: vertex 0 is lowest, vertex 3 leftmost.
  const double theta = tilt;
  const PolygonShape box = rectangle(w, w);
  const Vector2d low = rotate(theta, box.vertices[0]);
  const Vector2d left = rotate(theta, box.vertices[3]);
  s.bodies.push_back(PlanarBody{"box", m, m * w * w / 6.0, box,
                                Pose{-left.x(), -low.y(), theta}});
  s.environment.push_back(floor_plane());
  s.environment.push_back(HalfPlane{"wall", {0.0, 0.0}, {1.0, 0.0}});
  s.contacts = {
      ContactSpec{"A", 1.0, ContactKind::kVertexEnv, 0, 0, 0},
      ContactSpec{"B", 1.0, ContactKind::kVertexEnv, 0, 3, 1},
  };
  s.v0 = VectorXd(3);
  s.v0 << -1.0, 0.0, 0.0;
  s.defaults = SimDefaults{2.0, 5, std::size_t{1} << 18};
  return s;
}

Scene disk_stack_scene() {
  const double r = 1.0, m = 1.0, mu = std::sqrt(3.0);
  Scene s;
  s.name = "disk_stack";
  const DiskShape disk{r};
  s.bodies = {
      PlanarBody{"top", m, 0.5 * m * r * r, disk, Pose{0.0, r + std::sqrt(3.0) * r, 0.0}},
      PlanarBody{"left", m, 0.5 * m * r * r, disk, Pose{-r, r, 0.0}},
      PlanarBody{"right", m, 0.5 * m * r * r, disk, Pose{r, r, 0.0}},
  };
  s.environment.push_back(floor_plane());
  s.contacts = {
      ContactSpec{"A", mu, ContactKind::kDiskDisk, 1, -1, 0},
      ContactSpec{"B", mu, ContactKind::kDiskDisk, 2, -1, 0},
      ContactSpec{"C", mu, ContactKind::kDiskEnv, 1, -1, 0},
      ContactSpec{"D", mu, ContactKind::kDiskEnv, 2, -1, 0},
      ContactSpec{"E", mu, ContactKind::kDiskDisk, 1, -1, 2},
  };
  s.v0 = VectorXd::Zero(9);
  s.v0[1] = -1.0;
  s.defaults = SimDefaults{1.0, 10, std::size_t{1} << 20};
  s.mirror_body_map = std::vector<int>{0, 2, 1};
  return s;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"phone", "compass", "box_wall", "disk_stack"};
}

Scene builtin_scene(const std::string& name) {
  if (name == "phone") return phone_scene();
  if (name == "compass") return compass_scene();
  if (name == "box_wall") return box_wall_scene();
  if (name == "disk_stack") return disk_stack_scene();
  fail(ErrorCode::kInvalidArgument, "unknown example '" + name + "'");
}

Example example_from_scene(Scene scene) {
  Example ex;
  ex.problem = build_problem(scene);
  ex.v0 = scene.v0;
  ex.defaults = scene.defaults;
  ex.scene = std::move(scene);
  return ex;
}

Example build_example(const std::string& name) {
  return example_from_scene(builtin_scene(name));
}

MatrixXd reflect_map(const Scene& scene) {
  if (!scene.mirror_body_map) {
    fail(ErrorCode::kAsymmetricScene,
         "scene '" + scene.name + "' has no mirror symmetry");
  }
  const auto& map = *scene.mirror_body_map;
  const int nv = num_dofs(scene);
  MatrixXd R = MatrixXd::Zero(nv, nv);
  for (std::size_t k = 0; k < map.size(); ++k) {
    const int j = map[k];
    R(3 * j, 3 * k) = -1.0;
    R(3 * j + 1, 3 * k + 1) = 1.0;
    R(3 * j + 2, 3 * k + 2) = -1.0;
  }
  return R;
}

MatrixXd reflect_map(const std::string& name) { return reflect_map(builtin_scene(name)); }

std::vector<int> mirror_contact_map(const Scene& scene) {
  const MatrixXd R = reflect_map(scene);
  const ContactJacobians J = contact_jacobians(scene, configuration(scene));
  const int m = static_cast<int>(scene.contacts.size());
  std::vector<int> out(m, -1);
  for (int i = 0; i < m; ++i) {
    const Eigen::RowVectorXd target = J.jn.row(i) * R;
    for (int j = 0; j < m; ++j) {
      if ((J.jn.row(j) - target).cwiseAbs().maxCoeff() <= 1e-9 &&
          scene.contacts[i].mu == scene.contacts[j].mu) {
        out[i] = j;
        break;
      }
    }
    if (out[i] < 0) {
      fail(ErrorCode::kAsymmetricScene,
           "contact '" + scene.contacts[i].label + "' has no mirror partner");
    }
  }
  return out;
}

ImpactProblem one_dof_ball(double mu) {
  return ImpactProblem::from_tangent(MatrixXd::Identity(1, 1), MatrixXd::Ones(1, 1),
                                     MatrixXd::Zero(1, 1), VectorXd::Constant(1, mu),
                                     {"floor"});
}

ImpactProblem jamming_problem() {
  MatrixXd jn(2, 1);
  jn << 1.0, -1.0;
  return ImpactProblem::from_tangent(MatrixXd::Identity(1, 1), jn, MatrixXd::Zero(2, 1),
                                     VectorXd::Ones(2), {"left", "right"});
}

}  // namespace multimpact
