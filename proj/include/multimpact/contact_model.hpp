#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace multimpact {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Generalized velocity.
using VelocityState = VectorXd;

inline constexpr double kImpactTol = 1e-10;

// Frozen-configuration contact data. The tangential Jacobian holds two rows
// per contact, +t and -t, and only active contacts are carried.
class ImpactProblem {
 public:
  ImpactProblem() = default;
  ImpactProblem(MatrixXd mass, MatrixXd jn, MatrixXd jd, VectorXd mu,
                std::vector<std::string> labels = {});

  // Builds jd from one tangent row per contact.
  static ImpactProblem from_tangent(MatrixXd mass, MatrixXd jn,
                                    const MatrixXd& jt, VectorXd mu,
                                    std::vector<std::string> labels = {});

  int num_contacts() const { return static_cast<int>(jn_.rows()); }
  int num_velocities() const { return static_cast<int>(mass_.rows()); }

  const MatrixXd& mass() const { return mass_; }
  const MatrixXd& jn() const { return jn_; }
  const MatrixXd& jd() const { return jd_; }
  const VectorXd& mu() const { return mu_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Rows +t of each contact.
  MatrixXd jt() const;
  // [jn; jd].
  const MatrixXd& jbar() const { return jbar_; }
  // M^-1 jbar', solved through the cached Cholesky factor.
  const MatrixXd& minv_jbar_t() const { return minv_jbar_t_; }
  // jbar M^-1 jbar'.
  const MatrixXd& delassus() const { return delassus_; }

  MatrixXd solve_mass(const MatrixXd& rhs) const;

  // Subproblem on a subset of contacts, in the given order.
  ImpactProblem restricted_to(const std::vector<int>& contacts) const;

  int contact_index(const std::string& label) const;

 private:
  MatrixXd mass_, jn_, jd_;
  VectorXd mu_;
  std::vector<std::string> labels_;
  Eigen::LLT<MatrixXd> llt_;
  MatrixXd jbar_, minv_jbar_t_, delassus_;
};

double kinetic_energy(const ImpactProblem& p, const VelocityState& v);
double mass_norm(const ImpactProblem& p, const VelocityState& v);

bool is_impacting(const ImpactProblem& p, const VelocityState& v,
                  double tol_v = kImpactTol);

// Force (lambda_n, beta) admissible at v_plus under the linearized cone with
// maximum dissipation and normal complementarity.
bool in_linear_cone(const ImpactProblem& p, const VelocityState& v_plus,
                    const VectorXd& lambda_n, const VectorXd& beta, double tol);

}  // namespace multimpact
