#include "metgen/model.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "metgen/errors.hpp"

namespace metgen {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedStep: return "MalformedStep";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::CyclicProof: return "CyclicProof";
    case ErrorKind::MultipleRoots: return "MultipleRoots";
    case ErrorKind::InvalidTree: return "InvalidTree";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::AmbiguousType: return "AmbiguousType";
    case ErrorKind::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorKind::NoCandidates: return "NoCandidates";
    case ErrorKind::NoValidCandidate: return "NoValidCandidate";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ModuleUnavailable: return "ModuleUnavailable";
    case ErrorKind::MissingPrediction: return "MissingPrediction";
    case ErrorKind::TransportError: return "TransportError";
    case ErrorKind::ProtocolError: return "ProtocolError";
    case ErrorKind::BackendRefused: return "BackendRefused";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TransportError:
    case ErrorKind::ProtocolError:
    case ErrorKind::BackendRefused:
      return kExitBackend;
    case ErrorKind::Internal:
      return kExitInternal;
    default:
      return kExitInput;
  }
}

FactRole role_of(std::string_view id) {
  if (id == kHypothesisId) return FactRole::Hypothesis;
  if (id.starts_with("sent") && id_number(id) >= 0) return FactRole::Leaf;
  if (id.starts_with("int") && id_number(id) >= 0) return FactRole::Intermediate;
  return FactRole::Unknown;
}

long id_number(std::string_view id) {
  size_t start = 0;
  if (id.starts_with("sent")) {
    start = 4;
  } else if (id.starts_with("int")) {
    start = 3;
  } else {
    return -1;
  }
  if (start == id.size()) return -1;
  long value = 0;
  auto [ptr, ec] = std::from_chars(id.data() + start, id.data() + id.size(), value);
  if (ec != std::errc() || ptr != id.data() + id.size() || value < 0) return -1;
  return value;
}

bool id_less(std::string_view a, std::string_view b) {
  auto rank = [](std::string_view id) {
    switch (role_of(id)) {
      case FactRole::Leaf: return 0;
      case FactRole::Intermediate: return 1;
      case FactRole::Hypothesis: return 2;
      case FactRole::Unknown: return 3;
    }
    return 3;
  };
  int ra = rank(a);
  int rb = rank(b);
  if (ra != rb) return ra < rb;
  if (ra <= 1) {
    long na = id_number(a);
    long nb = id_number(b);
    if (na != nb) return na < nb;
  }
  return a < b;
}

std::string leaf_id(long k) { return "sent" + std::to_string(k); }
std::string intermediate_id(long k) { return "int" + std::to_string(k); }

std::string_view to_string(Direction d) {
  return d == Direction::Deductive ? "deductive" : "abductive";
}

std::string_view to_string(ReasoningType t) {
  switch (t) {
    case ReasoningType::Substitution: return "substitution";
    case ReasoningType::Conjunction: return "conjunction";
    case ReasoningType::IfThen: return "ifthen";
    case ReasoningType::Unknown: return "unknown";
  }
  return "unknown";
}

Direction parse_direction(std::string_view s) {
  if (s == "deductive") return Direction::Deductive;
  if (s == "abductive") return Direction::Abductive;
  throw Error(ErrorKind::ParseError, "unknown direction '" + std::string(s) + "'");
}

ReasoningType parse_reasoning_type(std::string_view s) {
  if (s == "substitution") return ReasoningType::Substitution;
  if (s == "conjunction") return ReasoningType::Conjunction;
  if (s == "ifthen" || s == "if-then") return ReasoningType::IfThen;
  if (s == "unknown") return ReasoningType::Unknown;
  throw Error(ErrorKind::ParseError, "unknown reasoning type '" + std::string(s) + "'");
}

const Fact* EntailmentTree::find(std::string_view id) const {
  if (id == hypothesis.id) return &hypothesis;
  for (const auto& f : leaves) {
    if (f.id == id) return &f;
  }
  for (const auto& f : intermediates) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

const Step* EntailmentTree::producer(std::string_view id) const {
  for (const auto& s : steps) {
    if (s.output == id) return &s;
  }
  return nullptr;
}

std::vector<std::string> EntailmentTree::descendant_leaves(std::string_view id) const {
  std::set<std::string> out;
  std::set<std::string> visiting;
  std::vector<std::string> stack{std::string(id)};
  while (!stack.empty()) {
    std::string cur = std::move(stack.back());
    stack.pop_back();
    if (!visiting.insert(cur).second) continue;
    const Step* s = producer(cur);
    if (s == nullptr) {
      if (role_of(cur) == FactRole::Leaf) out.insert(cur);
      continue;
    }
    for (const auto& in : s->inputs) stack.push_back(in);
  }
  std::vector<std::string> result(out.begin(), out.end());
  std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) { return id_less(a, b); });
  return result;
}

const Fact* ReasoningState::find_fact(std::string_view id) const {
  for (const auto& f : facts) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

long ReasoningState::max_intermediate() const {
  long best = 0;
  auto consider = [&](std::string_view id) {
    if (role_of(id) == FactRole::Intermediate) best = std::max(best, id_number(id));
  };
  consider(target.id);
  for (const auto& f : facts) consider(f.id);
  for (const auto& h : history) {
    consider(h.generated.id);
    consider(h.step.output);
  }
  return best;
}

std::string content_of(const Fact& fact) {
  return fact.sym ? fact.sym->key() : fact.text;
}

std::string ReasoningState::content_key() const {
  std::vector<std::string> parts;
  parts.reserve(facts.size());
  for (const auto& f : facts) parts.push_back(content_of(f));
  std::sort(parts.begin(), parts.end());
  std::string key = content_of(target) + " <= {";
  for (const auto& p : parts) key += p + "|";
  key += "}";
  return key;
}

std::string ReasoningState::history_key() const {
  std::string key;
  for (const auto& h : history) {
    key += h.step.direction == Direction::Deductive ? "D:" : "A:";
    for (const auto& in : h.step.inputs) key += in + ",";
    key += std::string(to_string(h.step.rtype)) + "->" + h.step.output + ";";
  }
  return key;
}

std::vector<std::string> check_state_invariants(const ReasoningState& state) {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  for (const auto& f : state.facts) {
    if (f.id.empty()) problems.push_back("fact with empty id");
    if (!ids.insert(f.id).second) problems.push_back("duplicate fact id " + f.id);
  }
  if (ids.count(state.target.id) != 0) problems.push_back("target " + state.target.id + " is among the facts");
  std::set<std::string> produced;
  for (const auto& h : state.history) {
    if (h.generated.id != h.step.output) problems.push_back("history output mismatch for " + h.step.output);
    if (!produced.insert(h.step.output).second) problems.push_back("id generated twice: " + h.step.output);
  }
  for (const auto& f : state.facts) {
    if (f.role() == FactRole::Intermediate && produced.count(f.id) == 0 && !state.history.empty()) {
      problems.push_back("intermediate " + f.id + " has no producing step");
    }
  }
  if (!state.history.empty()) {
    const auto& last_abductive = std::find_if(state.history.rbegin(), state.history.rend(), [](const auto& h) {
      return h.step.direction == Direction::Abductive;
    });
    if (last_abductive != state.history.rend() && last_abductive->generated.id != state.target.id) {
      problems.push_back("target does not match the latest abductive output");
    }
  }
  return problems;
}

}  // namespace metgen
