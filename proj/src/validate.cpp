#include "metgen/proof_format.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace metgen {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::MalformedStep: return "MalformedStep";
    case ViolationKind::UnknownId: return "UnknownId";
    case ViolationKind::NonLeafMustBeIntermediate: return "NonLeafMustBeIntermediate";
    case ViolationKind::MissingProducer: return "MissingProducer";
    case ViolationKind::MultipleProducers: return "MultipleProducers";
    case ViolationKind::Cycle: return "Cycle";
    case ViolationKind::MultipleRoots: return "MultipleRoots";
    case ViolationKind::MissingRoot: return "MissingRoot";
    case ViolationKind::UnusedLeaf: return "UnusedLeaf";
    case ViolationKind::Disconnected: return "Disconnected";
    case ViolationKind::LeafNotAvailable: return "LeafNotAvailable";
    case ViolationKind::DuplicateId: return "DuplicateId";
  }
  return "Unknown";
}

std::vector<Violation> validate_tree(const EntailmentTree& tree, const std::vector<Fact>* available) {
  std::vector<Violation> out;
  auto add = [&](ViolationKind k, std::string detail) { out.push_back({k, std::move(detail)}); };

  std::set<std::string> leaf_ids;
  std::set<std::string> int_ids;
  for (const auto& f : tree.leaves) {
    if (f.role() != FactRole::Leaf) add(ViolationKind::UnknownId, "leaf with non-leaf id " + f.id);
    if (!leaf_ids.insert(f.id).second) add(ViolationKind::DuplicateId, f.id);
  }
  for (const auto& f : tree.intermediates) {
    if (f.role() != FactRole::Intermediate) add(ViolationKind::NonLeafMustBeIntermediate, f.id);
    if (!int_ids.insert(f.id).second || leaf_ids.count(f.id)) add(ViolationKind::DuplicateId, f.id);
  }
  if (tree.hypothesis.id != tree.root_id) add(ViolationKind::MissingRoot, "hypothesis id differs from root id");

  auto known = [&](const std::string& id) {
    return leaf_ids.count(id) || int_ids.count(id) || id == tree.root_id;
  };

  std::map<std::string, int> producers;
  std::set<std::string> used_as_input;
  for (const auto& s : tree.steps) {
    if (s.inputs.size() < 2) add(ViolationKind::MalformedStep, "step -> " + s.output + " has fewer than 2 premises");
    std::set<std::string> distinct(s.inputs.begin(), s.inputs.end());
    if (distinct.size() != s.inputs.size()) add(ViolationKind::MalformedStep, "repeated premise in step -> " + s.output);
    if (distinct.count(s.output)) add(ViolationKind::Cycle, "step output " + s.output + " is its own premise");
    for (const auto& in : s.inputs) {
      if (!known(in)) add(ViolationKind::UnknownId, in);
      used_as_input.insert(in);
    }
    if (role_of(s.output) == FactRole::Leaf) {
      add(ViolationKind::NonLeafMustBeIntermediate, "step outputs leaf id " + s.output);
    } else if (!known(s.output)) {
      add(ViolationKind::UnknownId, s.output);
    }
    producers[s.output]++;
  }
  for (const auto& [id, n] : producers) {
    if (n > 1) add(ViolationKind::MultipleProducers, id);
  }
  for (const auto& id : int_ids) {
    if (!producers.count(id)) add(ViolationKind::MissingProducer, id);
  }
  if (!producers.count(tree.root_id)) add(ViolationKind::MissingRoot, "no step concludes " + tree.root_id);
  if (used_as_input.count(tree.root_id)) add(ViolationKind::Cycle, "root used as a premise");

  // Sinks: produced nodes not used as inputs.
  std::vector<std::string> sinks;
  for (const auto& [id, n] : producers) {
    if (!used_as_input.count(id)) sinks.push_back(id);
  }
  if (sinks.size() > 1) {
    std::string d;
    for (const auto& s : sinks) d += s + " ";
    add(ViolationKind::MultipleRoots, d);
  }

  // Cycle detection via DFS over producer edges.
  std::map<std::string, const Step*> by_output;
  for (const auto& s : tree.steps) by_output.emplace(s.output, &s);
  std::map<std::string, int> color;
  bool cyclic = false;
  auto dfs = [&](auto&& self, const std::string& id) -> void {
    int& c = color[id];
    if (c == 1) {
      cyclic = true;
      return;
    }
    if (c == 2) return;
    c = 1;
    auto it = by_output.find(id);
    if (it != by_output.end()) {
      for (const auto& in : it->second->inputs) self(self, in);
    }
    color[id] = 2;
  };
  for (const auto& s : tree.steps) dfs(dfs, s.output);
  if (cyclic) add(ViolationKind::Cycle, "step graph has a cycle");

  // Everything must be reachable from the root.
  std::set<std::string> reach;
  if (!cyclic) {
    std::vector<std::string> stack{tree.root_id};
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      if (!reach.insert(cur).second) continue;
      auto it = by_output.find(cur);
      if (it != by_output.end()) {
        for (const auto& in : it->second->inputs) stack.push_back(in);
      }
    }
    for (const auto& id : leaf_ids) {
      if (!used_as_input.count(id)) {
        add(ViolationKind::UnusedLeaf, id);
      } else if (!reach.count(id)) {
        add(ViolationKind::Disconnected, id);
      }
    }
    for (const auto& id : int_ids) {
      if (!reach.count(id)) add(ViolationKind::Disconnected, id);
    }
  }

  if (available != nullptr) {
    std::set<std::string> avail;
    for (const auto& f : *available) avail.insert(f.id);
    for (const auto& id : leaf_ids) {
      if (!avail.count(id)) add(ViolationKind::LeafNotAvailable, id);
    }
  }
  return out;
}

}  // namespace metgen
