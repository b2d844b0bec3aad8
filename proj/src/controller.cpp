#include "metgen/controller.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "metgen/errors.hpp"
#include "metgen/rules.hpp"

namespace metgen {

namespace {

std::set<std::string> token_set(const std::string& text) {
  auto toks = content_tokens(text);
  return {toks.begin(), toks.end()};
}

double token_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

}  // namespace

std::string StepCandidate::id() const {
  return std::string(kind == Direction::Deductive ? "ded:" : "abd:") + first + "," + second;
}

bool candidate_less(const StepCandidate& a, const StepCandidate& b) {
  if (a.kind != b.kind) return a.kind == Direction::Deductive;
  if (a.first != b.first) return id_less(a.first, b.first);
  return id_less(a.second, b.second);
}

bool facts_overlap(const Fact& a, const Fact& b) {
  if (a.sym && b.sym) return shares_symbol(*a.sym, *b.sym);
  auto ta = token_set(a.text);
  for (const auto& t : content_tokens(b.text)) {
    if (ta.count(t)) return true;
  }
  return false;
}

std::vector<StepCandidate> enumerate_steps(const ReasoningState& state) {
  std::vector<const Fact*> facts;
  for (const auto& f : state.facts) facts.push_back(&f);
  std::sort(facts.begin(), facts.end(), [](const Fact* a, const Fact* b) { return id_less(a->id, b->id); });
  std::vector<StepCandidate> out;
  for (size_t i = 0; i < facts.size(); ++i) {
    for (size_t j = i + 1; j < facts.size(); ++j) {
      if (facts_overlap(*facts[i], *facts[j])) {
        out.push_back(StepCandidate{Direction::Deductive, facts[i]->id, facts[j]->id, 0.0});
      }
    }
  }
  for (const Fact* f : facts) {
    if (facts_overlap(state.target, *f)) {
      out.push_back(StepCandidate{Direction::Abductive, state.target.id, f->id, 0.0});
    }
  }
  return out;
}

std::vector<double> softmax(const std::vector<double>& raw) {
  std::vector<double> out(raw.size());
  if (raw.empty()) return out;
  double mx = *std::max_element(raw.begin(), raw.end());
  double sum = 0.0;
  for (size_t i = 0; i < raw.size(); ++i) {
    out[i] = std::exp(raw[i] - mx);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<StepCandidate> score_steps(const ReasoningState& state, const ScorerBackend& backend) {
  auto candidates = enumerate_steps(state);
  if (candidates.empty()) throw Error(ErrorKind::EmptyCandidateSet, "no step candidate for target " + state.target.id);
  auto probs = softmax(backend.raw_step_scores(state, candidates));
  for (size_t i = 0; i < candidates.size(); ++i) candidates[i].score = probs[i];
  return candidates;
}

double score_state(const ReasoningState& state, const ScorerBackend& backend, const ControllerConfig& config) {
  if (state.facts.empty()) return (1.0 - config.lambda) * backend.cls_score(state);
  double sum = 0.0;
  for (const auto& f : state.facts) sum += backend.fact_score(state.target, f);
  double mean = sum / static_cast<double>(state.facts.size());
  return config.lambda * mean + (1.0 - config.lambda) * backend.cls_score(state);
}

void attach_scores(ReasoningState& state, const ScorerBackend& backend, const ControllerConfig& config) {
  StateScores s;
  for (const auto& f : state.facts) s.fact_scores[f.id] = backend.fact_score(state.target, f);
  s.state_score = score_state(state, backend, config);
  state.scores = std::move(s);
}

double LexicalBackend::fact_score(const Fact& target, const Fact& fact) const {
  return std::clamp(judge_->similarity(target, fact), 0.0, 1.0);
}

double LexicalBackend::cls_score(const ReasoningState& state) const {
  double best = 0.0;
  for (const auto& f : state.facts) best = std::max(best, fact_score(state.target, f));
  return best;
}

double LexicalBackend::deductive_score(const ReasoningState& state, const Fact& a, const Fact& b) const {
  double best = -1.0;
  if (a.sym && b.sym) {
    for (ReasoningType t : kReasoningTypes) {
      auto c = deduce(t, *a.sym, *b.sym);
      if (!c) continue;
      Fact concl{"", c->render(), *c};
      best = std::max(best, 1.5 + 0.5 * fact_score(state.target, concl));
    }
  }
  if (best >= 0.0) return best;
  auto u = token_set(a.text);
  for (const auto& t : content_tokens(b.text)) u.insert(t);
  return 0.5 * token_jaccard(u, token_set(state.target.text));
}

double LexicalBackend::abductive_score(const ReasoningState& state, const Fact& known) const {
  if (!state.target.sym || !known.sym) return 0.0;
  double best = -1.0;
  for (ReasoningType t : kReasoningTypes) {
    auto m = abduce(t, *state.target.sym, *known.sym);
    if (!m) continue;
    Fact missing{"", m->render(), *m};
    double sim = 0.0;
    for (const auto& f : state.facts) {
      if (f.id != known.id) sim = std::max(sim, fact_score(missing, f));
    }
    best = std::max(best, sim >= 1.0 ? 2.0 : 1.0 + 0.5 * sim);
  }
  return std::max(best, 0.0);
}

std::vector<double> LexicalBackend::raw_step_scores(const ReasoningState& state,
                                                    const std::vector<StepCandidate>& candidates) const {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    const Fact* b = state.find_fact(c.second);
    if (b == nullptr) throw Error(ErrorKind::UnknownId, c.second);
    if (c.kind == Direction::Deductive) {
      const Fact* a = state.find_fact(c.first);
      if (a == nullptr) throw Error(ErrorKind::UnknownId, c.first);
      out.push_back(deductive_score(state, *a, *b));
    } else {
      out.push_back(abductive_score(state, *b));
    }
  }
  return out;
}

}  // namespace metgen
