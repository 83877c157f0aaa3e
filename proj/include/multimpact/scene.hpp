#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "multimpact/contact_model.hpp"

namespace multimpact {

struct Pose {
  double x = 0.0, y = 0.0, theta = 0.0;
};

// Vertices in the body frame, counter-clockwise.
struct PolygonShape {
  std::vector<Eigen::Vector2d> vertices;
};

struct DiskShape {
  double radius = 0.0;
};

using Shape = std::variant<PolygonShape, DiskShape>;

struct PlanarBody {
  std::string name;
  double mass = 0.0;
  double inertia = 0.0;
  Shape shape;
  Pose pose;
};

// Fixed half-plane {x : normal . (x - point) >= 0}.
struct HalfPlane {
  std::string name;
  Eigen::Vector2d point = Eigen::Vector2d::Zero();
  Eigen::Vector2d normal = Eigen::Vector2d::UnitY();
};

enum class ContactKind {
  kVertexEnv,  // polygon vertex `vertex` of `body` against half-plane `other`
  kDiskEnv,    // disk `body` against half-plane `other`
  kDiskDisk,   // disk `body` against disk `other`; normal points body -> other
  kFootEnv,    // compass-gait foot `body` (0 trailing, 1 leading) on `other`
};

const char* contact_kind_name(ContactKind kind);
ContactKind parse_contact_kind(const std::string& name);

struct ContactSpec {
  std::string label;
  double mu = 1.0;
  ContactKind kind = ContactKind::kVertexEnv;
  int body = 0;
  int vertex = -1;
  int other = 0;
};

// Two pin-jointed legs with point masses at mass_to_foot from each foot.
// Coordinates (hip x, hip y, pitch trailing, pitch leading); a pitch of
// zero hangs the leg straight down and positive pitch swings the foot to +x.
struct CompassGait {
  double leg_length = 1.0;
  double mass_to_foot = 0.5;
  double leg_mass = 1.0;
  double hip_x = 0.0, hip_y = 0.0;
  double pitch_trailing = 0.0, pitch_leading = 0.0;
};

enum class ModelKind { kRigidBodies, kCompassGait };

struct SimDefaults {
  double h = 1.0;
  std::size_t n = 1;
  // Trajectory count used by the published figures.
  std::size_t m_paper = 1;
};

struct Scene {
  std::string name;
  ModelKind model = ModelKind::kRigidBodies;
  std::vector<PlanarBody> bodies;
  CompassGait compass;
  std::vector<HalfPlane> environment;
  std::vector<ContactSpec> contacts;
  VectorXd v0;
  SimDefaults defaults;
  // Body permutation under reflection about the vertical axis x = 0.
  std::optional<std::vector<int>> mirror_body_map;

  // Throws kInvalidArgument on inconsistent references or parameters.
  void validate() const;
};

int num_dofs(const Scene& scene);
VectorXd configuration(const Scene& scene);

VectorXd gap(const Scene& scene, const VectorXd& q);

struct ContactJacobians {
  MatrixXd jn, jt;
};

ContactJacobians contact_jacobians(const Scene& scene, const VectorXd& q);
MatrixXd mass_matrix(const Scene& scene, const VectorXd& q);

// Impact problem at the scene's stored configuration.
ImpactProblem build_problem(const Scene& scene);

struct Example {
  Scene scene;
  ImpactProblem problem;
  VelocityState v0;
  SimDefaults defaults;
};

std::vector<std::string> builtin_names();
Scene builtin_scene(const std::string& name);
Example build_example(const std::string& name);
Example example_from_scene(Scene scene);

// Velocity-space involution of a mirror-symmetric scene.
MatrixXd reflect_map(const Scene& scene);
MatrixXd reflect_map(const std::string& name);

// Contact permutation induced by the mirror: contact i maps to result[i].
std::vector<int> mirror_contact_map(const Scene& scene);

// Unit point mass on a line hitting a fixed floor; one contact, J_t = 0.
ImpactProblem one_dof_ball(double mu = 1.0);

// One coordinate pinched between two opposing contacts with J_t = 0.
ImpactProblem jamming_problem();

}  // namespace multimpact
