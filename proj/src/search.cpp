#include "metgen/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "metgen/errors.hpp"
#include "metgen/proof_format.hpp"

namespace metgen {

std::string_view to_string(Task t) {
  switch (t) {
    case Task::Task1: return "task1";
    case Task::Task2: return "task2";
    case Task::Task3: return "task3";
  }
  return "task2";
}

std::string_view to_string(Strategy s) { return s == Strategy::Controller ? "controller" : "heuristic"; }

void validate_config(const SearchConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); };
  if (c.beam_size < 1) fail("beam size must be positive");
  if (c.max_depth < 1) fail("max depth must be positive");
  if (!(c.theta >= 0.0 && c.theta <= 1.0)) fail("theta must lie in [0, 1]");
  if (!(c.tau > 0.0 && c.tau <= 1.0)) fail("tau must lie in (0, 1]");
  if (!(c.prove_threshold >= 0.0 && c.prove_threshold <= 1.0)) fail("prove threshold must lie in [0, 1]");
  if (!(c.controller.lambda >= 0.0 && c.controller.lambda <= 1.0)) fail("lambda must lie in [0, 1]");
  if (c.controller.m_step < 0.0 || c.controller.m_fact < 0.0 || c.controller.m_state < 0.0) {
    fail("margins must be nonnegative");
  }
}

ReasoningState filter_distractors(const ReasoningState& state, const ScorerBackend& backend, double theta,
                                  bool* degenerate) {
  if (degenerate) *degenerate = false;
  ReasoningState out = state;
  out.facts.clear();
  for (const auto& f : state.facts) {
    if (backend.fact_score(state.target, f) >= theta) out.facts.push_back(f);
  }
  if (out.facts.empty() && !state.facts.empty()) {
    if (degenerate) *degenerate = true;
    return state;
  }
  return out;
}

namespace {

struct Scored {
  ReasoningState state;
  double score = 0.0;
  int parent = -1;
};

bool better(const Scored& a, const Scored& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.state.history_key() < b.state.history_key();
}

bool is_repeat(const Fact& out, const Fact& a, const Fact& b) {
  auto same = [&](const Fact& p) { return content_of(out) == content_of(p) || out.text == p.text; };
  return same(a) || same(b);
}

// Best fact for the target: highest similarity, then smallest id.
std::pair<const Fact*, double> align_target(const ReasoningState& s, const SimilarityJudge& judge) {
  const Fact* best = nullptr;
  double best_sim = -1.0;
  for (const auto& f : s.facts) {
    double sim = judge.similarity(s.target, f);
    if (sim > best_sim || (sim == best_sim && best && id_less(f.id, best->id))) {
      best = &f;
      best_sim = sim;
    }
  }
  return {best, std::max(best_sim, 0.0)};
}

class Searcher {
 public:
  Searcher(const SearchConfig& config, const EntailmentModule& module, const ScorerBackend* backend,
           const SimilarityJudge& judge, const TraceSink& trace)
      : config_(config), module_(module), backend_(backend), judge_(judge), trace_(trace) {}

  SearchResult run(const Fact& hypothesis, const std::vector<Fact>& facts) {
    validate_config(config_);
    SearchResult result;
    ReasoningState root;
    root.target = hypothesis;
    root.target.id = std::string(kHypothesisId);
    root.facts = facts;
    std::sort(root.facts.begin(), root.facts.end(), [](const Fact& a, const Fact& b) { return id_less(a.id, b.id); });

    bool controller = config_.strategy == Strategy::Controller;
    if (controller && config_.task != Task::Task1) {
      bool degenerate = false;
      root = filter_distractors(root, *backend_, config_.theta, &degenerate);
      if (degenerate) result.warnings.push_back("distractor filter would remove every fact; kept the original set");
    }
    if (enumerate_steps(root).empty()) throw Error(ErrorKind::NoCandidates, "no step candidate in the initial state");

    int max_iter = config_.max_depth;
    if (config_.task == Task::Task1) max_iter = std::max<int>(1, static_cast<int>(root.facts.size()) - 1);

    std::vector<Scored> beam{{root, state_score(root), -1}};
    result.all_states.push_back(root);
    for (int iter = 1; iter <= max_iter; ++iter) {
      TraceRecord record;
      record.iteration = iter;
      std::map<std::string, Scored> children;
      for (size_t b = 0; b < beam.size(); ++b) expand(beam[b].state, static_cast<int>(b), children, record);
      if (children.empty()) break;
      result.iterations = iter;

      std::vector<Scored> next;
      next.reserve(children.size());
      for (auto& [key, s] : children) next.push_back(std::move(s));
      std::stable_sort(next.begin(), next.end(), better);
      if (next.size() > static_cast<size_t>(config_.beam_size)) next.resize(config_.beam_size);

      bool any_proved = false;
      for (auto& s : next) {
        bool proved = is_proved(s.state);
        any_proved = any_proved || proved;
        record.beam.push_back({s.state.target.id, s.state.history_key(), s.score, proved});
        ReasoningState kept = s.state;
        if (controller) attach_scores(kept, *backend_, config_.controller);
        result.all_states.push_back(std::move(kept));
      }
      if (trace_) trace_(record);
      beam = std::move(next);
      if (any_proved) break;
    }

    select_tree(hypothesis, facts, result);
    return result;
  }

 private:
  double state_score(const ReasoningState& s) const {
    if (config_.strategy == Strategy::Controller) return score_state(s, *backend_, config_.controller);
    if (s.facts.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& f : s.facts) sum += judge_.similarity(s.target, f);
    return sum / static_cast<double>(s.facts.size());
  }

  bool is_proved(const ReasoningState& s) const {
    for (const auto& f : s.facts) {
      if (judge_.similarity(s.target, f) >= config_.prove_threshold) return true;
    }
    return false;
  }

  std::vector<StepCandidate> select(const ReasoningState& s) const {
    std::vector<StepCandidate> cands;
    if (config_.strategy == Strategy::Heuristic) return enumerate_steps(s);
    try {
      cands = score_steps(s, *backend_);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::EmptyCandidateSet) return {};
      throw;
    }
    std::stable_sort(cands.begin(), cands.end(), [](const StepCandidate& a, const StepCandidate& b) {
      if (a.score != b.score) return a.score > b.score;
      return candidate_less(a, b);
    });
    size_t k = static_cast<size_t>(std::ceil(config_.tau * static_cast<double>(cands.size()) - 1e-12));
    cands.resize(std::clamp<size_t>(k, 1, cands.size()));
    return cands;
  }

  void add_child(ReasoningState child, int parent, std::map<std::string, Scored>& children) const {
    double score = state_score(child);
    std::string key = child.content_key();
    Scored s{std::move(child), score, parent};
    auto it = children.find(key);
    if (it == children.end()) {
      children.emplace(std::move(key), std::move(s));
    } else if (better(s, it->second)) {
      it->second = std::move(s);
    }
  }

  void expand(const ReasoningState& s, int parent, std::map<std::string, Scored>& children, TraceRecord& record) const {
    bool abductive_used = false;
    for (const auto& c : select(s)) {
      if (c.kind == Direction::Abductive && abductive_used) continue;
      bool fired = c.kind == Direction::Deductive ? deductive(s, c, parent, children)
                                                  : abductive(s, c, parent, children);
      if (fired) record.chosen.push_back({parent, c.id(), c.score});
      if (c.kind == Direction::Abductive && fired) abductive_used = true;
    }
  }

  bool deductive(const ReasoningState& s, const StepCandidate& c, int parent,
                 std::map<std::string, Scored>& children) const {
    const Fact* a = s.find_fact(c.first);
    const Fact* b = s.find_fact(c.second);
    std::string out_id = intermediate_id(s.max_intermediate() + 1);
    bool fired = false;
    for (ReasoningType t : kReasoningTypes) {
      if (!module_.supports(Direction::Deductive, t)) continue;
      auto resp = module_.infer(ModuleRequest{Direction::Deductive, t, {*a, *b}, out_id});
      if (!resp) continue;
      Fact out = resp->output;
      out.id = out_id;
      if (is_repeat(out, *a, *b)) continue;
      ReasoningState child = s;
      child.scores.reset();
      child.facts.erase(std::remove_if(child.facts.begin(), child.facts.end(),
                                       [&](const Fact& f) { return f.id == a->id || f.id == b->id; }),
                        child.facts.end());
      child.facts.push_back(out);
      child.history.push_back({Step{Direction::Deductive, t, {a->id, b->id}, out_id}, out});
      add_child(std::move(child), parent, children);
      fired = true;
    }
    return fired;
  }

  bool abductive(const ReasoningState& s, const StepCandidate& c, int parent,
                 std::map<std::string, Scored>& children) const {
    const Fact* known = s.find_fact(c.second);
    std::string out_id = intermediate_id(s.max_intermediate() + 1);
    bool fired = false;
    for (ReasoningType t : kReasoningTypes) {
      if (!module_.supports(Direction::Abductive, t)) continue;
      auto resp = module_.infer(ModuleRequest{Direction::Abductive, t, {s.target, *known}, out_id});
      if (!resp) continue;
      Fact out = resp->output;
      out.id = out_id;
      if (is_repeat(out, s.target, *known)) continue;
      ReasoningState child = s;
      child.scores.reset();
      child.facts.erase(std::remove_if(child.facts.begin(), child.facts.end(),
                                       [&](const Fact& f) { return f.id == known->id; }),
                        child.facts.end());
      child.history.push_back({Step{Direction::Abductive, t, {s.target.id, known->id}, out_id}, out});
      child.target = out;
      add_child(std::move(child), parent, children);
      fired = true;
    }
    return fired;
  }

  void select_tree(const Fact& hypothesis, const std::vector<Fact>& facts, SearchResult& result) const {
    struct Best {
      double sim = -1.0;
      double score = 0.0;
      std::string key;
      EntailmentTree tree;
    };
    std::optional<Best> best;
    for (const auto& s : result.all_states) {
      if (s.history.empty()) continue;
      auto [anchor, sim] = align_target(s, judge_);
      if (anchor == nullptr) continue;
      auto tree = state_to_tree(s, hypothesis, facts, anchor->id);
      if (!tree) continue;
      double score = s.scores ? s.scores->state_score : state_score(s);
      std::string key = s.history_key();
      bool take = !best || sim > best->sim || (sim == best->sim && score > best->score) ||
                  (sim == best->sim && score == best->score && key < best->key);
      if (take) best = Best{sim, score, std::move(key), std::move(*tree)};
    }
    if (best) {
      result.proved = best->sim >= config_.prove_threshold;
      result.best_tree = std::move(best->tree);
    }
  }

  const SearchConfig& config_;
  const EntailmentModule& module_;
  const ScorerBackend* backend_;
  const SimilarityJudge& judge_;
  const TraceSink& trace_;
};

}  // namespace

std::optional<EntailmentTree> state_to_tree(const ReasoningState& state, const Fact& hypothesis,
                                            const std::vector<Fact>& facts, const std::string& anchor_id) {
  std::map<std::string, Fact> known;
  for (const auto& f : facts) known[f.id] = f;
  for (const auto& h : state.history) known[h.generated.id] = h.generated;

  std::vector<Step> steps;
  std::string last_target(kHypothesisId);
  bool abductive = false;
  for (const auto& h : state.history) {
    if (h.step.direction == Direction::Deductive) {
      steps.push_back(h.step);
    } else {
      steps.push_back(Step{Direction::Deductive, h.step.rtype, {h.step.inputs.at(1), h.step.output}, h.step.inputs.at(0)});
      last_target = h.step.output;
      abductive = true;
    }
  }
  std::map<std::string, std::string> rename;
  if (abductive) {
    rename[last_target] = anchor_id;
  } else {
    if (role_of(anchor_id) != FactRole::Intermediate) return std::nullopt;
    rename[anchor_id] = std::string(kHypothesisId);
  }
  auto mapped = [&](const std::string& id) {
    auto it = rename.find(id);
    return it == rename.end() ? id : it->second;
  };
  EntailmentTree tree;
  tree.hypothesis = hypothesis;
  tree.hypothesis.id = std::string(kHypothesisId);
  for (auto s : steps) {
    for (auto& in : s.inputs) in = mapped(in);
    s.output = mapped(s.output);
    tree.steps.push_back(std::move(s));
  }
  std::set<std::string> referenced;
  for (const auto& s : tree.steps) {
    referenced.insert(s.output);
    for (const auto& in : s.inputs) referenced.insert(in);
  }
  for (const auto& id : referenced) {
    if (id == kHypothesisId) continue;
    auto it = known.find(id);
    if (it == known.end()) return std::nullopt;
    (role_of(id) == FactRole::Leaf ? tree.leaves : tree.intermediates).push_back(it->second);
  }
  tree = prune_to_root(tree);
  if (tree.producer(tree.root_id) == nullptr) return std::nullopt;
  tree = canonicalize(tree);
  if (!validate_tree(tree, nullptr).empty()) return std::nullopt;
  return tree;
}

SearchResult reason(const Fact& hypothesis, const std::vector<Fact>& facts, const SearchConfig& config,
                    const EntailmentModule& module, const ScorerBackend& backend, const SimilarityJudge& judge,
                    const TraceSink& trace) {
  SearchConfig c = config;
  c.strategy = Strategy::Controller;
  return Searcher(c, module, &backend, judge, trace).run(hypothesis, facts);
}

SearchResult heuristic_reason(const Fact& hypothesis, const std::vector<Fact>& facts, const SearchConfig& config,
                              const EntailmentModule& module, const SimilarityJudge& judge, const TraceSink& trace) {
  SearchConfig c = config;
  c.strategy = Strategy::Heuristic;
  return Searcher(c, module, nullptr, judge, trace).run(hypothesis, facts);
}

std::vector<RankedCandidate> rank_one_step_candidates(const Fact& hypothesis, const std::vector<Fact>& facts,
                                                      const std::vector<std::pair<std::string, std::string>>& candidates,
                                                      const SearchConfig& config, const ScorerBackend& backend) {
  ReasoningState state;
  state.target = hypothesis;
  state.target.id = std::string(kHypothesisId);
  state.facts = facts;
  ReasoningState kept = filter_distractors(state, backend, config.theta);

  std::vector<StepCandidate> live;
  std::vector<size_t> live_index;
  std::vector<RankedCandidate> out;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto& [a, b] = candidates[i];
    out.push_back({a, b, 0.0});
    if (kept.find_fact(a) && kept.find_fact(b)) {
      live.push_back(StepCandidate{Direction::Deductive, a, b, 0.0});
      live_index.push_back(i);
    }
  }
  if (!live.empty()) {
    auto probs = softmax(backend.raw_step_scores(kept, live));
    for (size_t i = 0; i < live.size(); ++i) out[live_index[i]].score = probs[i];
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedCandidate& x, const RankedCandidate& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.first != y.first) return id_less(x.first, y.first);
    return id_less(x.second, y.second);
  });
  return out;
}

}  // namespace metgen
