#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "multimpact/impact.hpp"
#include "multimpact/oracles.hpp"
#include "multimpact/scene.hpp"
#include "multimpact/set_approximation.hpp"

namespace multimpact {

inline constexpr const char* kFormatHeader = "# multimpact-format v1";
inline constexpr const char* kSceneFormat = "multimpact-scene v1";

using nlohmann::json;

// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);
json number_to_json(double x);
double number_from_json(const json& j);

json vector_to_json(const VectorXd& v);
VectorXd vector_from_json(const json& j);
json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const json& j);

json problem_to_json(const ImpactProblem& p);
ImpactProblem problem_from_json(const json& j);

json lcp_debug_json(const LcpInstance& lcp, const LcpSolution* sol = nullptr);

json scene_to_json(const Scene& scene);
Scene scene_from_json(const json& j);
Scene load_scene_file(const std::string& path);

// Run metadata written next to every export.
struct ExportMeta {
  std::string scene;
  std::vector<std::pair<std::string, std::string>> fields;
};

void write_trajectory_csv(std::ostream& os, const Trajectory& t,
                          const ImpactProblem& p, const ExportMeta& meta);
json trajectory_to_json(const Trajectory& t, const ImpactProblem& p,
                        const ExportMeta& meta);

void write_set_csv(std::ostream& os, const PostImpactSet& set,
                   const ImpactProblem& p, const ExportMeta& meta);
json set_to_json(const PostImpactSet& set, const ImpactProblem& p,
                 const ExportMeta& meta);

void write_dense_csv(std::ostream& os, const DenseTrajectory& d,
                     const ImpactProblem& p, const ExportMeta& meta);
json dense_to_json(const DenseTrajectory& d, const ImpactProblem& p,
                   const ExportMeta& meta);

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows,
                       const ImpactProblem& p, const ExportMeta& meta);
json compare_to_json(const std::vector<CompareRow>& rows, const ImpactProblem& p,
                     const ExportMeta& meta);

}  // namespace multimpact
