#include "metgen/decompose.hpp"

#include <algorithm>
#include <map>

#include "metgen/errors.hpp"
#include "metgen/proof_format.hpp"

namespace metgen {

namespace {

void sort_facts(std::vector<Fact>& facts) {
  std::sort(facts.begin(), facts.end(), [](const Fact& a, const Fact& b) { return id_less(a.id, b.id); });
}

// Path of steps from the root down to `id` (root step first); empty if unreachable.
bool path_to(const EntailmentTree& tree, const std::string& from, const std::string& id,
             std::vector<const Step*>& path) {
  if (from == id) return true;
  const Step* s = tree.producer(from);
  if (s == nullptr) return false;
  path.push_back(s);
  for (const auto& in : s->inputs) {
    if (path_to(tree, in, id, path)) return true;
  }
  path.pop_back();
  return false;
}

}  // namespace

std::vector<ReasoningState> decompose_to_states(const EntailmentTree& gold, const std::vector<Fact>& distractors) {
  auto violations = validate_tree(gold, nullptr);
  if (!violations.empty()) {
    throw Error(ErrorKind::InvalidTree,
                std::string(to_string(violations.front().kind)) + " " + violations.front().detail);
  }

  std::vector<ReasoningState> states;
  ReasoningState state;
  state.target = gold.hypothesis;
  state.facts = gold.leaves;
  state.facts.insert(state.facts.end(), distractors.begin(), distractors.end());
  sort_facts(state.facts);
  states.push_back(state);

  long next_int = 0;
  for (const auto& f : gold.intermediates) next_int = std::max(next_int, id_number(f.id));

  for (const Step& step : topological_steps(gold)) {
    for (const auto& in : step.inputs) {
      auto it = std::find_if(state.facts.begin(), state.facts.end(), [&](const Fact& f) { return f.id == in; });
      if (it != state.facts.end()) state.facts.erase(it);
    }
    Fact produced;
    if (step.output == gold.root_id) {
      produced = gold.hypothesis;
      produced.id = intermediate_id(++next_int);
    } else {
      produced = *gold.find(step.output);
    }
    Step recorded = step;
    recorded.output = produced.id;
    state.history.push_back({recorded, produced});
    state.facts.push_back(produced);
    sort_facts(state.facts);
    states.push_back(state);
  }

  for (const auto& inter : gold.intermediates) {
    std::vector<const Step*> path;
    if (!path_to(gold, gold.root_id, inter.id, path)) continue;
    ReasoningState abd;
    abd.target = inter;
    for (const auto& id : gold.descendant_leaves(inter.id)) abd.facts.push_back(*gold.find(id));
    abd.facts.insert(abd.facts.end(), distractors.begin(), distractors.end());
    sort_facts(abd.facts);
    std::string current = gold.root_id;
    for (size_t k = 0; k < path.size(); ++k) {
      const Step* s = path[k];
      std::string next = (k + 1 < path.size()) ? path[k + 1]->output : inter.id;
      Step a{Direction::Abductive, s->rtype, {current}, next};
      for (const auto& in : s->inputs) {
        if (in != next) a.inputs.push_back(in);
      }
      abd.history.push_back({a, *gold.find(next)});
      current = next;
    }
    states.push_back(std::move(abd));
  }
  return states;
}

}  // namespace metgen
