#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metgen/model.hpp"
#include "metgen/search.hpp"

namespace metgen {

struct ProblemInstance {
  std::string id;
  Fact hypothesis;
  std::vector<Fact> facts;  // the context as provided, sorted by id
  std::optional<EntailmentTree> gold;
  Task task = Task::Task2;
};

// Facts the search sees for the given task: gold leaves for Task1, the whole
// context otherwise.
std::vector<Fact> task_facts(const ProblemInstance& instance, Task task);

// Gold leaves excluded from the context.
std::vector<Fact> distractors_of(const ProblemInstance& instance);

// Record fields: id | question_id | qid; hypothesis; sentences as "context"
// (string "sent1: ... sent2: ..." or object), "sentences" or
// "meta.triples"; optional "proof"; optional "symbolic" (id -> s-expression).
ProblemInstance instance_from_json(const nlohmann::json& record);
nlohmann::json instance_to_json(const ProblemInstance& instance);

// Task3 retrieval: question id -> retrieved sentences.
using RetrievalMap = std::map<std::string, std::vector<std::string>>;

// One JSON record per line. Throws Error{ParseError} naming the line, or
// Error{InvariantViolation} when a gold proof does not fit its sentences.
// For Task3 the context is replaced by the retrieved sentences; a retrieved
// sentence identical to a gold leaf keeps that leaf's id.
std::vector<ProblemInstance> load_dataset(const std::string& path, Task task, const RetrievalMap* retrieval = nullptr);
std::vector<ProblemInstance> parse_dataset(std::istream& in, Task task, const RetrievalMap* retrieval = nullptr);

// JSONL {id, sentences: [...]} or a single object {id: [...]}.
RetrievalMap load_retrieval(const std::string& path);

struct LabeledCandidate {
  std::string first;
  std::string second;
  bool valid = false;
};

struct CandidatePool {
  ProblemInstance instance;
  std::vector<LabeledCandidate> candidates;
};

// JSONL {question_id, hypothesis, facts: [...] | {id: text}, candidates:
// [{premises: [id, id], label: 0|1}]}. Pools without a valid candidate are
// dropped and reported in *notices. Throws Error{ParseError}.
std::vector<CandidatePool> load_candidates(const std::string& path, std::vector<std::string>* notices = nullptr);
std::vector<CandidatePool> parse_candidates(std::istream& in, std::vector<std::string>* notices = nullptr);
nlohmann::json pool_to_json(const CandidatePool& pool);

struct GeneratorConfig {
  std::uint64_t seed = 1;
  int n_instances = 100;
  int min_depth = 1;
  int max_depth = 4;
  int n_entities = 40;    // per alphabet (tree and distractor)
  int n_predicates = 20;  // per alphabet
  int min_distractors = 15;
  int max_distractors = 20;
  bool hard_distractors = false;
  double hard_fraction = 0.5;
  double weight_substitution = 1.0;
  double weight_conjunction = 1.0;
  double weight_ifthen = 1.0;
};

// Synthetic corpus with known, unique gold trees. Every leaf shares a symbol
// with the hypothesis; distractors come from a disjoint alphabet unless hard
// distractors are requested, which share a hypothesis entity and may combine
// with each other but fire no rule with any gold leaf or intermediate. Throws Error{ConfigError}.
std::vector<ProblemInstance> generate_synthetic(const GeneratorConfig& config);

// Single instance, seeded from (config.seed, index).
ProblemInstance generate_instance(const GeneratorConfig& config, std::uint64_t index);

// Number of distinct derivations of `goal` from any subset of `leaves`
// (premises consumed, every rule type counted separately), capped at `cap`.
long count_proofs(const std::vector<SymbolicFact>& leaves, const SymbolicFact& goal, long cap = 2);

}  // namespace metgen
