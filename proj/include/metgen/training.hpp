#pragma once

#include <vector>

#include "metgen/judge.hpp"
#include "metgen/model.hpp"
#include "metgen/modules.hpp"

namespace metgen {

struct TrainingStates {
  std::vector<ReasoningState> positives;
  std::vector<ReasoningState> negatives;
};

// For every two-premise gold step, runs the module once deductively (premises
// to conclusion) and once abductively (conclusion and one premise to the other,
// preferring to abduce an intermediate premise). A generated fact judged
// > threshold against gold and not repeating a premise makes a positive state;
// anything else, including a module that declines, makes a negative one.
//
// Deductive states are the forward decomposition state after that step with
// the generated conclusion in place of the gold one. Abductive states target
// the generated premise over the distractors plus the leaves below the gold
// premise.
//
// Throws Error{ModuleUnavailable} when the module does not support a step's
// type, Error{InvalidTree} for an invalid gold tree.
TrainingStates make_training_states(const EntailmentTree& gold, const std::vector<Fact>& distractors,
                                    const EntailmentModule& module, const SimilarityJudge& judge, double threshold);

}  // namespace metgen
