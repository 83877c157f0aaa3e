#include "multimpact/contact_model.hpp"

#include <algorithm>
#include <cmath>

#include "multimpact/error.hpp"

namespace multimpact {

ImpactProblem::ImpactProblem(MatrixXd mass, MatrixXd jn, MatrixXd jd,
                             VectorXd mu, std::vector<std::string> labels)
    : mass_(std::move(mass)),
      jn_(std::move(jn)),
      jd_(std::move(jd)),
      mu_(std::move(mu)),
      labels_(std::move(labels)) {
  const auto nv = mass_.rows();
  const auto m = jn_.rows();
  require(mass_.cols() == nv && nv > 0, ErrorCode::kDimensionMismatch,
          "mass matrix must be square and nonempty");
  require(jn_.cols() == nv, ErrorCode::kDimensionMismatch,
          "normal Jacobian column count differs from mass size");
  require(jd_.rows() == 2 * m && jd_.cols() == nv,
          ErrorCode::kDimensionMismatch,
          "tangential Jacobian must have two rows per contact");
  require(mu_.size() == m, ErrorCode::kDimensionMismatch,
          "friction vector length differs from contact count");
  require(mass_.allFinite() && jn_.allFinite() && jd_.allFinite() &&
              mu_.allFinite(),
          ErrorCode::kInvalidArgument, "non-finite problem data");

  const double mscale = std::max(1.0, mass_.cwiseAbs().maxCoeff());
  require((mass_ - mass_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * mscale,
          ErrorCode::kNotPositiveDefinite, "mass matrix is not symmetric");
  llt_.compute(mass_);
  require(llt_.info() == Eigen::Success, ErrorCode::kNotPositiveDefinite,
          "mass matrix is not positive definite");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(mass_, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() > 0.0, ErrorCode::kNotPositiveDefinite,
          "mass matrix is not positive definite");

  for (Eigen::Index i = 0; i < m; ++i) {
    require(jn_.row(i).norm() > 0.0, ErrorCode::kInvalidArgument,
            "normal Jacobian row " + std::to_string(i) + " is zero");
    const double s = 1.0 + jd_.row(2 * i).cwiseAbs().maxCoeff();
    require((jd_.row(2 * i) + jd_.row(2 * i + 1)).cwiseAbs().maxCoeff() <=
                1e-12 * s,
            ErrorCode::kInvalidArgument,
            "tangential rows of contact " + std::to_string(i) +
                " are not opposite");
    require(mu_[i] > 0.0, ErrorCode::kInvalidArgument,
            "friction coefficients must be positive");
  }
  if (labels_.empty()) {
    for (Eigen::Index i = 0; i < m; ++i) labels_.push_back("c" + std::to_string(i));
  }
  require(static_cast<Eigen::Index>(labels_.size()) == m,
          ErrorCode::kDimensionMismatch, "label count differs from contact count");

  jbar_.resize(3 * m, nv);
  jbar_ << jn_, jd_;
  minv_jbar_t_ = llt_.solve(jbar_.transpose());
  delassus_ = jbar_ * minv_jbar_t_;
}

ImpactProblem ImpactProblem::from_tangent(MatrixXd mass, MatrixXd jn,
                                          const MatrixXd& jt, VectorXd mu,
                                          std::vector<std::string> labels) {
  require(jt.rows() == jn.rows() && jt.cols() == jn.cols(),
          ErrorCode::kDimensionMismatch, "tangent Jacobian shape differs");
  MatrixXd jd(2 * jt.rows(), jt.cols());
  for (Eigen::Index i = 0; i < jt.rows(); ++i) {
    jd.row(2 * i) = jt.row(i);
    jd.row(2 * i + 1) = -jt.row(i);
  }
  return ImpactProblem(std::move(mass), std::move(jn), std::move(jd),
                       std::move(mu), std::move(labels));
}

MatrixXd ImpactProblem::jt() const {
  MatrixXd out(num_contacts(), num_velocities());
  for (int i = 0; i < num_contacts(); ++i) out.row(i) = jd_.row(2 * i);
  return out;
}

MatrixXd ImpactProblem::solve_mass(const MatrixXd& rhs) const {
  require(rhs.rows() == mass_.rows(), ErrorCode::kDimensionMismatch,
          "solve_mass: row count differs from mass size");
  return llt_.solve(rhs);
}

ImpactProblem ImpactProblem::restricted_to(const std::vector<int>& contacts) const {
  const auto k = static_cast<Eigen::Index>(contacts.size());
  MatrixXd jn(k, num_velocities()), jd(2 * k, num_velocities());
  VectorXd mu(k);
  std::vector<std::string> labels;
  for (Eigen::Index r = 0; r < k; ++r) {
    const int c = contacts[r];
    require(c >= 0 && c < num_contacts(), ErrorCode::kInvalidArgument,
            "contact index out of range");
    jn.row(r) = jn_.row(c);
    jd.row(2 * r) = jd_.row(2 * c);
    jd.row(2 * r + 1) = jd_.row(2 * c + 1);
    mu[r] = mu_[c];
    labels.push_back(labels_[c]);
  }
  return ImpactProblem(mass_, jn, jd, mu, labels);
}

int ImpactProblem::contact_index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  require(it != labels_.end(), ErrorCode::kInvalidArgument,
          "unknown contact label '" + label + "'");
  return static_cast<int>(it - labels_.begin());
}

namespace {

void check_velocity(const ImpactProblem& p, const VelocityState& v) {
  require(v.size() == p.num_velocities(), ErrorCode::kDimensionMismatch,
          "velocity length differs from problem size");
}

}  // namespace

double kinetic_energy(const ImpactProblem& p, const VelocityState& v) {
  check_velocity(p, v);
  return 0.5 * v.dot(p.mass() * v);
}

double mass_norm(const ImpactProblem& p, const VelocityState& v) {
  check_velocity(p, v);
  return std::sqrt(std::max(0.0, v.dot(p.mass() * v)));
}

bool is_impacting(const ImpactProblem& p, const VelocityState& v, double tol_v) {
  if (v.size() != p.num_velocities() || p.num_contacts() == 0) return false;
  const VectorXd vn = p.jn() * v;
  return vn.minCoeff() < -tol_v * (1.0 + v.norm());
}

bool in_linear_cone(const ImpactProblem& p, const VelocityState& v_plus,
                    const VectorXd& lambda_n, const VectorXd& beta, double tol) {
  check_velocity(p, v_plus);
  const int m = p.num_contacts();
  require(lambda_n.size() == m && beta.size() == 2 * m,
          ErrorCode::kDimensionMismatch, "force has wrong length");
  const VectorXd vn = p.jn() * v_plus;
  const VectorXd vd = p.jd() * v_plus;
  const double fscale = 1.0 + std::max(lambda_n.cwiseAbs().maxCoeff(),
                                       beta.size() ? beta.cwiseAbs().maxCoeff() : 0.0);
  const double vscale =
      1.0 + std::max(vn.cwiseAbs().maxCoeff(), vd.cwiseAbs().maxCoeff());
  const double ptol = tol * fscale * vscale;
  for (int i = 0; i < m; ++i) {
    if (lambda_n[i] < -tol * fscale) return false;
    if (lambda_n[i] * vn[i] > ptol) return false;
    const double gamma = std::max(0.0, -std::min(vd[2 * i], vd[2 * i + 1]));
    double slack = p.mu()[i] * lambda_n[i];
    for (int k = 0; k < 2; ++k) {
      const double b = beta[2 * i + k];
      if (b < -tol * fscale) return false;
      if (b * (vd[2 * i + k] + gamma) > ptol) return false;
      slack -= b;
    }
    if (slack < -tol * fscale) return false;
    if (gamma * slack > ptol) return false;
  }
  return true;
}

}  // namespace multimpact
