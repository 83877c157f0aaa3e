#include "multimpact/outcomes.hpp"

#include <cmath>

#include "multimpact/error.hpp"

namespace multimpact {

const char* outcome_name(ContactOutcome o) {
  switch (o) {
    case ContactOutcome::kStick: return "stick";
    case ContactOutcome::kSlide: return "slide";
    case ContactOutcome::kLift: return "lift";
  }
  return "unknown";
}

ContactOutcome classify_contact(const ImpactProblem& p, const VelocityState& v,
                                int contact, double tol) {
  require(v.size() == p.num_velocities(), ErrorCode::kDimensionMismatch,
          "velocity length differs from problem size");
  require(contact >= 0 && contact < p.num_contacts(), ErrorCode::kInvalidArgument,
          "contact index out of range");
  if (p.jn().row(contact).dot(v) > tol) return ContactOutcome::kLift;
  if (std::abs(p.jd().row(2 * contact).dot(v)) > tol) return ContactOutcome::kSlide;
  return ContactOutcome::kStick;
}

std::string joint_class(const ImpactProblem& p, const VelocityState& v, double tol) {
  std::string out;
  for (int i = 0; i < p.num_contacts(); ++i) {
    if (i) out += ',';
    out += p.labels()[i] + ':' + outcome_name(classify_contact(p, v, i, tol));
  }
  return out;
}

OutcomeHistogram classify_outcomes(const std::vector<VelocityState>& samples,
                                   const ImpactProblem& p, double tol) {
  OutcomeHistogram h;
  h.per_contact.assign(p.num_contacts(), {0, 0, 0});
  for (const auto& v : samples) {
    for (int i = 0; i < p.num_contacts(); ++i) {
      ++h.per_contact[i][static_cast<int>(classify_contact(p, v, i, tol))];
    }
    ++h.joint[joint_class(p, v, tol)];
    ++h.total;
  }
  return h;
}

}  // namespace multimpact
