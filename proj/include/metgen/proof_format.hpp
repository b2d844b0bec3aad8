#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "metgen/model.hpp"

namespace metgen {

enum class ViolationKind {
  MalformedStep,
  UnknownId,
  NonLeafMustBeIntermediate,
  MissingProducer,
  MultipleProducers,
  Cycle,
  MultipleRoots,
  MissingRoot,
  UnusedLeaf,
  Disconnected,
  LeafNotAvailable,
  DuplicateId,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

// Structural check; `available` is the fact set S the leaves must come from.
// Pass nullptr to skip the availability check.
std::vector<Violation> validate_tree(const EntailmentTree& tree, const std::vector<Fact>* available);
inline std::vector<Violation> validate_tree(const EntailmentTree& tree, const std::vector<Fact>& available) {
  return validate_tree(tree, &available);
}

// Parses "sent2 & sent5 -> int1: text; sent4 & int1 -> hypothesis;".
// Throws Error{MalformedStep, UnknownId, CyclicProof, MultipleRoots}.
EntailmentTree parse_linearized_proof(std::string_view proof_text,
                                      const std::map<std::string, Fact>& sentences,
                                      const Fact& hypothesis);

// Steps in topological order, ties by smallest output id; premises in id order.
std::string serialize_tree(const EntailmentTree& tree);

// Renumbers intermediates int1..intN in post-order, visiting children by their
// smallest descendant leaf, so equal structures serialize identically.
EntailmentTree canonicalize(const EntailmentTree& tree);

// Left-folds n-premise steps (n > 2) into 2-premise steps, premises in id order.
EntailmentTree binarize(const EntailmentTree& tree);

// Steps in the serialization order (topological, ties by smallest output id).
std::vector<Step> topological_steps(const EntailmentTree& tree);

// Keeps only steps reachable from the root and rebuilds leaf/intermediate lists.
EntailmentTree prune_to_root(const EntailmentTree& tree);

}  // namespace metgen
