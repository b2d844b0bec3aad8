#pragma once

#include <memory>
#include <string>
#include <vector>

#include "metgen/judge.hpp"
#include "metgen/model.hpp"

namespace metgen {

// Deductive: (first, second) are two fact ids, first before second.
// Abductive: first is the target id, second the known fact id.
struct StepCandidate {
  Direction kind = Direction::Deductive;
  std::string first;
  std::string second;
  double score = 0.0;

  // "ded:sent1,sent2" or "abd:hypothesis,sent3".
  std::string id() const;
};

// Candidate order: deductive before abductive, then by ids.
bool candidate_less(const StepCandidate& a, const StepCandidate& b);

struct ControllerConfig {
  double lambda = 0.5;
  double m_step = 0.1;
  double m_fact = 0.1;
  double m_state = 0.1;
  double theta = 0.001;
};

class ScorerBackend {
 public:
  virtual ~ScorerBackend() = default;
  virtual double fact_score(const Fact& target, const Fact& fact) const = 0;
  // Pre-softmax scores, one per candidate, same order.
  virtual std::vector<double> raw_step_scores(const ReasoningState& state,
                                              const std::vector<StepCandidate>& candidates) const = 0;
  virtual double cls_score(const ReasoningState& state) const = 0;
};

// True when the two facts share an entity/predicate symbol (both symbolic)
// or a content token (otherwise).
bool facts_overlap(const Fact& a, const Fact& b);

// All overlapping fact pairs plus (target, fact) abductive pairs, sorted.
std::vector<StepCandidate> enumerate_steps(const ReasoningState& state);

// Numerically stable softmax.
std::vector<double> softmax(const std::vector<double>& raw);

// Candidates from enumerate_steps with softmax-normalized scores.
// Throws Error{EmptyCandidateSet}.
std::vector<StepCandidate> score_steps(const ReasoningState& state, const ScorerBackend& backend);

// lambda * mean fact score + (1 - lambda) * cls score.
double score_state(const ReasoningState& state, const ScorerBackend& backend, const ControllerConfig& config);

// Fills state.scores.
void attach_scores(ReasoningState& state, const ScorerBackend& backend, const ControllerConfig& config);

// Deterministic stand-in for a trained controller.
//   fact score   judge(target, fact)
//   cls score    max fact score
//   deductive    1.5 + 0.5 * judge(conclusion, target) when a symbolic rule
//                fires (best over rule types)
//   abductive    2 when the abduced premise is itself an available fact,
//                else 1 + 0.5 * its best similarity to the remaining facts
//   no rule      0.5 * token Jaccard of the pair's union against the target
class LexicalBackend : public ScorerBackend {
 public:
  explicit LexicalBackend(std::shared_ptr<const SimilarityJudge> judge) : judge_(std::move(judge)) {}

  double fact_score(const Fact& target, const Fact& fact) const override;
  std::vector<double> raw_step_scores(const ReasoningState& state,
                                      const std::vector<StepCandidate>& candidates) const override;
  double cls_score(const ReasoningState& state) const override;

  const SimilarityJudge& judge() const { return *judge_; }

 private:
  double deductive_score(const ReasoningState& state, const Fact& a, const Fact& b) const;
  double abductive_score(const ReasoningState& state, const Fact& known) const;

  std::shared_ptr<const SimilarityJudge> judge_;
};

}  // namespace metgen
