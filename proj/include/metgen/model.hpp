#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metgen/symbolic.hpp"

namespace metgen {

inline constexpr std::string_view kHypothesisId = "hypothesis";

enum class FactRole { Leaf, Intermediate, Hypothesis, Unknown };

// "sent<k>" -> Leaf, "int<k>" -> Intermediate, "hypothesis" -> Hypothesis.
FactRole role_of(std::string_view id);
// Numeric suffix of sent<k>/int<k>, or -1.
long id_number(std::string_view id);
// Natural ordering: leaves, then intermediates, then the hypothesis; numeric within a role.
bool id_less(std::string_view a, std::string_view b);
std::string leaf_id(long k);
std::string intermediate_id(long k);

struct Fact {
  std::string id;
  std::string text;
  std::optional<SymbolicFact> sym;

  FactRole role() const { return role_of(id); }
  friend bool operator==(const Fact&, const Fact&) = default;
};

enum class Direction { Deductive, Abductive };
enum class ReasoningType { Substitution, Conjunction, IfThen, Unknown };

inline constexpr ReasoningType kReasoningTypes[] = {
    ReasoningType::Substitution, ReasoningType::Conjunction, ReasoningType::IfThen};

std::string_view to_string(Direction d);
std::string_view to_string(ReasoningType t);
Direction parse_direction(std::string_view s);
ReasoningType parse_reasoning_type(std::string_view s);

// Deductive: inputs are premises, output the conclusion.
// Abductive: inputs are {conclusion, known premise}, output the missing premise.
struct Step {
  Direction direction = Direction::Deductive;
  ReasoningType rtype = ReasoningType::Unknown;
  std::vector<std::string> inputs;
  std::string output;

  friend bool operator==(const Step&, const Step&) = default;
};

struct EntailmentTree {
  Fact hypothesis;
  std::vector<Fact> leaves;         // sorted by id_less
  std::vector<Fact> intermediates;  // sorted by id_less
  std::vector<Step> steps;
  std::string root_id{kHypothesisId};

  const Fact* find(std::string_view id) const;
  // Step producing `id`, or nullptr.
  const Step* producer(std::string_view id) const;
  // Leaf ids below `id` (the id itself for a leaf).
  std::vector<std::string> descendant_leaves(std::string_view id) const;
};

struct StateScores {
  std::map<std::string, double> fact_scores;
  double state_score = 0.0;
};

struct HistoryEntry {
  Step step;
  Fact generated;
};

// "Prove target from facts", plus the steps that led here.
struct ReasoningState {
  Fact target;
  std::vector<Fact> facts;
  std::vector<HistoryEntry> history;
  std::optional<StateScores> scores;

  const Fact* find_fact(std::string_view id) const;
  // Largest int<k> number used by target, facts or history.
  long max_intermediate() const;
  // Stable identity for duplicate suppression: target + sorted fact contents.
  std::string content_key() const;
  // Describes the step history, used for deterministic tie-breaking.
  std::string history_key() const;
};

// Content identity of a fact: its symbolic key when present, else the text.
std::string content_of(const Fact& fact);

// Empty when the state invariants hold.
std::vector<std::string> check_state_invariants(const ReasoningState& state);

}  // namespace metgen
