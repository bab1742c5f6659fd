#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "monowrap/core.hpp"

namespace monowrap {

// Distribution documents:
//   {"k": 2, "support": [{"point": "x0", "label": 0, "p": 0.25}, ...]}
// A point is either a string (finite-domain identifier) or an array of
// numbers (Euclidean point). Mixing the two in one document is rejected.
DiscreteDistribution distribution_from_json(const nlohmann::json& doc);
nlohmann::json distribution_to_json(const DiscreteDistribution& dist);

// Hypothesis tables: {"x0": 1, "x1": 0, ...} keyed by the point names of
// the distribution's domain. Every domain point must be assigned.
Hypothesis hypothesis_from_json(const nlohmann::json& table, const Domain& domain,
                                int num_labels);
nlohmann::json hypothesis_to_json(const Hypothesis& h, const Domain& domain);

}  // namespace monowrap
