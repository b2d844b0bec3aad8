#pragma once

#include <vector>

#include "metgen/model.hpp"

namespace metgen {

// Splits a gold tree into reasoning states.
//
// Forward states: one per prefix of the gold steps (in serialization order),
// target = hypothesis, facts = unused leaves + live intermediates + distractors.
// A step concluding the hypothesis yields a fresh int<k> fact carrying the
// hypothesis text, so the proved state keeps target and facts disjoint.
//
// Abductive states: one per intermediate i, target = i, facts = distractors +
// the leaves below i. History holds the abductive steps on the path from the
// root down to i.
//
// Throws Error{InvalidTree} when the gold tree fails validation.
std::vector<ReasoningState> decompose_to_states(const EntailmentTree& gold, const std::vector<Fact>& distractors);

// Number of leading forward states in decompose_to_states' output.
inline size_t forward_state_count(const EntailmentTree& gold) { return gold.steps.size() + 1; }

}  // namespace metgen
