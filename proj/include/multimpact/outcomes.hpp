#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "multimpact/contact_model.hpp"

namespace multimpact {

enum class ContactOutcome { kStick = 0, kSlide = 1, kLift = 2 };

const char* outcome_name(ContactOutcome o);

// lift iff J_n v > tol; else slide iff |J_t v| > tol; else stick.
ContactOutcome classify_contact(const ImpactProblem& p, const VelocityState& v,
                                int contact, double tol = 1e-6);

struct OutcomeHistogram {
  // Counts indexed by ContactOutcome, one entry per contact.
  std::vector<std::array<std::size_t, 3>> per_contact;
  // Joint class such as "A:stick,B:lift" -> count.
  std::map<std::string, std::size_t> joint;
  std::size_t total = 0;
};

std::string joint_class(const ImpactProblem& p, const VelocityState& v,
                        double tol = 1e-6);

OutcomeHistogram classify_outcomes(const std::vector<VelocityState>& samples,
                                   const ImpactProblem& p, double tol = 1e-6);

}  // namespace multimpact
