#include "metgen/training.hpp"

#include <algorithm>

#include "metgen/decompose.hpp"
#include "metgen/errors.hpp"
#include "metgen/proof_format.hpp"
#include "metgen/rules.hpp"

namespace metgen {

namespace {

std::vector<ReasoningType> candidate_types(const EntailmentTree& gold, const Step& step, const Fact& out) {
  if (step.rtype != ReasoningType::Unknown) return {step.rtype};
  const Fact* a = gold.find(step.inputs[0]);
  const Fact* b = gold.find(step.inputs[1]);
  if (a && b && a->sym && b->sym && out.sym) {
    if (auto t = classify_step(*a->sym, *b->sym, *out.sym)) return {*t};
  }
  return {std::begin(kReasoningTypes), std::end(kReasoningTypes)};
}

struct Attempt {
  Fact generated;
  ReasoningType rtype = ReasoningType::Unknown;
  bool positive = false;
};

Attempt run(const EntailmentModule& module, const SimilarityJudge& judge, double threshold, Direction dir,
            const std::vector<ReasoningType>& types, const Fact& in0, const Fact& in1, const Fact& gold_out,
            const std::string& out_id) {
  Attempt best{Fact{out_id, "", std::nullopt}, types.front(), false};
  double best_sim = -1.0;
  for (ReasoningType t : types) {
    if (!module.supports(dir, t)) {
      throw Error(ErrorKind::ModuleUnavailable,
                  std::string(to_string(dir)) + " " + std::string(to_string(t)) + " is not supported");
    }
    auto resp = module.infer(ModuleRequest{dir, t, {in0, in1}, out_id});
    if (!resp) continue;
    double sim = judge.similarity(resp->output, gold_out);
    if (sim > best_sim) {
      best_sim = sim;
      best.generated = resp->output;
      best.generated.id = out_id;
      best.rtype = t;
    }
  }
  if (best_sim < 0.0) return best;
  const Fact& g = best.generated;
  bool repeat = content_of(g) == content_of(in0) || content_of(g) == content_of(in1) || g.text == in0.text ||
                g.text == in1.text;
  best.positive = best_sim > threshold && !repeat;
  return best;
}

}  // namespace

TrainingStates make_training_states(const EntailmentTree& gold, const std::vector<Fact>& distractors,
                                    const EntailmentModule& module, const SimilarityJudge& judge, double threshold) {
  std::vector<ReasoningState> decomposed = decompose_to_states(gold, distractors);
  std::vector<Step> order = topological_steps(gold);
  long fresh = 0;
  for (const auto& f : gold.intermediates) fresh = std::max(fresh, id_number(f.id));
  fresh += 2;  // the forward decomposition already used max + 1 for the hypothesis

  TrainingStates out;
  auto place = [&](ReasoningState s, bool positive) {
    (positive ? out.positives : out.negatives).push_back(std::move(s));
  };

  for (size_t k = 0; k < order.size(); ++k) {
    const Step& step = order[k];
    if (step.inputs.size() != 2) continue;
    const Fact& gold_out = step.output == gold.root_id ? gold.hypothesis : *gold.find(step.output);
    auto types = candidate_types(gold, step, gold_out);
    const Fact& p0 = *gold.find(step.inputs[0]);
    const Fact& p1 = *gold.find(step.inputs[1]);

    ReasoningState fwd = decomposed.at(k + 1);
    const std::string out_id = fwd.history.back().generated.id;
    Attempt ded = run(module, judge, threshold, Direction::Deductive, types, p0, p1, gold_out, out_id);
    for (auto& f : fwd.facts) {
      if (f.id == out_id) f = ded.generated;
    }
    fwd.history.back().generated = ded.generated;
    fwd.history.back().step.rtype = ded.rtype;
    fwd.scores.reset();
    place(std::move(fwd), ded.positive);

    std::string missing_id = step.inputs[0];
    std::string known_id = step.inputs[1];
    if (role_of(missing_id) != FactRole::Intermediate && role_of(known_id) == FactRole::Intermediate) {
      std::swap(missing_id, known_id);
    }
    const Fact& missing = *gold.find(missing_id);
    const Fact& known = *gold.find(known_id);
    Fact conclusion = gold_out;
    conclusion.id = step.output;
    std::string abd_id = intermediate_id(fresh++);
    Attempt abd = run(module, judge, threshold, Direction::Abductive, types, conclusion, known, missing, abd_id);
    ReasoningState back;
    back.target = abd.generated;
    for (const auto& id : gold.descendant_leaves(missing_id)) back.facts.push_back(*gold.find(id));
    back.facts.insert(back.facts.end(), distractors.begin(), distractors.end());
    std::sort(back.facts.begin(), back.facts.end(), [](const Fact& a, const Fact& b) { return id_less(a.id, b.id); });
    back.history.push_back({Step{Direction::Abductive, abd.rtype, {conclusion.id, known_id}, abd_id}, abd.generated});
    place(std::move(back), abd.positive);
  }
  return out;
}

}  // namespace metgen
