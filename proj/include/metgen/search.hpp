#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "metgen/controller.hpp"
#include "metgen/judge.hpp"
#include "metgen/model.hpp"
#include "metgen/modules.hpp"

namespace metgen {

enum class Task { Task1, Task2, Task3 };
enum class Strategy { Controller, Heuristic };

std::string_view to_string(Task t);
std::string_view to_string(Strategy s);

struct SearchConfig {
  int beam_size = 10;
  int max_depth = 5;
  double theta = 0.001;
  double tau = 0.10;
  Task task = Task::Task2;
  Strategy strategy = Strategy::Controller;
  double prove_threshold = 1.0;
  ControllerConfig controller;
};

// Throws Error{ConfigError} on out-of-range values.
void validate_config(const SearchConfig& config);

struct TraceRecord {
  struct Entry {
    std::string target;
    std::string history;
    double score = 0.0;
    bool proved = false;
  };
  struct Chosen {
    int parent = 0;  // index into the previous beam
    std::string candidate;
    double score = 0.0;
  };
  int iteration = 0;
  std::vector<Chosen> chosen;
  std::vector<Entry> beam;
};

using TraceSink = std::function<void(const TraceRecord&)>;

struct SearchResult {
  std::optional<EntailmentTree> best_tree;
  std::vector<ReasoningState> all_states;
  bool proved = false;
  int iterations = 0;
  std::vector<std::string> warnings;
};

// Drops facts scoring below theta against the target. Keeps the original
// facts, and sets *degenerate, when nothing would survive.
ReasoningState filter_distractors(const ReasoningState& state, const ScorerBackend& backend, double theta,
                                  bool* degenerate = nullptr);

// Beam search over reasoning states.
//
// Each iteration expands the top ceil(tau * n) scored candidates of every beam
// state with every reasoning type, at most one abductive candidate per state.
// Deductive steps consume their premises and add the conclusion; abductive
// steps consume the known premise and replace the target with the abduced one.
// Children are deduplicated by content and the top beam_size kept.
// The search stops after max_depth iterations (Task1: |facts| - 1), when an
// iteration yields a proved state, or when nothing expands.
//
// The returned tree comes from the visited state whose target is most similar
// to one of its facts; that fact stands in for the target.
//
// Throws Error{NoCandidates} when the initial state has no step candidate.
SearchResult reason(const Fact& hypothesis, const std::vector<Fact>& facts, const SearchConfig& config,
                    const EntailmentModule& module, const ScorerBackend& backend, const SimilarityJudge& judge,
                    const TraceSink& trace = {});

// Controller-free baseline: no filtering, no step scores; every firing step
// expands and states score by mean judge similarity to the target.
SearchResult heuristic_reason(const Fact& hypothesis, const std::vector<Fact>& facts, const SearchConfig& config,
                              const EntailmentModule& module, const SimilarityJudge& judge,
                              const TraceSink& trace = {});

// Builds the tree for a state whose target has been aligned to `anchor_id`.
// Returns nullopt when the state has no usable derivation.
std::optional<EntailmentTree> state_to_tree(const ReasoningState& state, const Fact& hypothesis,
                                            const std::vector<Fact>& facts, const std::string& anchor_id);

struct RankedCandidate {
  std::string first;
  std::string second;
  double score = 0.0;
};

// Scores the given deductive pairs after distractor filtering; pairs touching
// a filtered fact score 0. Ordered by score desc, then ids.
std::vector<RankedCandidate> rank_one_step_candidates(const Fact& hypothesis, const std::vector<Fact>& facts,
                                                      const std::vector<std::pair<std::string, std::string>>& candidates,
                                                      const SearchConfig& config, const ScorerBackend& backend);

}  // namespace metgen
