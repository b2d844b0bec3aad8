#include "metgen/proof_format.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

#include "metgen/errors.hpp"

namespace metgen {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, std::string_view sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + sep.size();
  }
  return parts;
}

void sort_facts(std::vector<Fact>& facts) {
  std::sort(facts.begin(), facts.end(), [](const Fact& a, const Fact& b) { return id_less(a.id, b.id); });
}

void sort_ids(std::vector<std::string>& ids) {
  std::sort(ids.begin(), ids.end(), [](const auto& a, const auto& b) { return id_less(a, b); });
}

}  // namespace

EntailmentTree parse_linearized_proof(std::string_view proof_text,
                                      const std::map<std::string, Fact>& sentences,
                                      const Fact& hypothesis) {
  struct RawStep {
    std::vector<std::string> inputs;
    std::string output;
    std::string text;
  };
  std::vector<RawStep> raw;
  for (const auto& chunk : split(proof_text, ";")) {
    std::string step_text = trim(chunk);
    if (step_text.empty()) continue;
    auto arrow = step_text.find("->");
    if (arrow == std::string::npos || step_text.find("->", arrow + 2) != std::string::npos) {
      throw Error(ErrorKind::MalformedStep, "expected exactly one '->' in '" + step_text + "'");
    }
    RawStep rs;
    for (const auto& p : split(std::string_view(step_text).substr(0, arrow), "&")) {
      std::string id = trim(p);
      if (id.empty()) throw Error(ErrorKind::MalformedStep, "empty premise in '" + step_text + "'");
      rs.inputs.push_back(id);
    }
    if (rs.inputs.size() < 2) {
      throw Error(ErrorKind::MalformedStep, "a step needs at least two premises: '" + step_text + "'");
    }
    std::string rhs = trim(std::string_view(step_text).substr(arrow + 2));
    auto colon = rhs.find(':');
    if (colon == std::string::npos) {
      rs.output = rhs;
    } else {
      rs.output = trim(std::string_view(rhs).substr(0, colon));
      rs.text = trim(std::string_view(rhs).substr(colon + 1));
    }
    FactRole role = role_of(rs.output);
    // "hypothesis: <text>" also appears in some releases; the text is ignored.
    if (role != FactRole::Hypothesis && (role != FactRole::Intermediate || colon == std::string::npos)) {
      throw Error(ErrorKind::MalformedStep, "conclusion must be 'int<k>: text' or 'hypothesis': '" + step_text + "'");
    }
    raw.push_back(std::move(rs));
  }
  if (raw.empty()) throw Error(ErrorKind::MalformedStep, "proof has no steps");

  EntailmentTree tree;
  tree.hypothesis = hypothesis;
  tree.hypothesis.id = std::string(kHypothesisId);

  std::map<std::string, Fact> ints;
  for (const auto& rs : raw) {
    if (role_of(rs.output) != FactRole::Intermediate) continue;
    if (ints.count(rs.output)) throw Error(ErrorKind::MalformedStep, rs.output + " is concluded twice");
    ints.emplace(rs.output, Fact{rs.output, rs.text, std::nullopt});
  }
  std::map<std::string, Fact> used_leaves;
  int hypothesis_steps = 0;
  for (const auto& rs : raw) {
    for (const auto& in : rs.inputs) {
      if (in == kHypothesisId) throw Error(ErrorKind::CyclicProof, "hypothesis used as a premise");
      switch (role_of(in)) {
        case FactRole::Leaf: {
          auto it = sentences.find(in);
          if (it == sentences.end()) throw Error(ErrorKind::UnknownId, in);
          used_leaves.emplace(in, it->second);
          break;
        }
        case FactRole::Intermediate:
          if (!ints.count(in)) throw Error(ErrorKind::UnknownId, in);
          break;
        default:
          throw Error(ErrorKind::UnknownId, in);
      }
    }
    if (rs.output == kHypothesisId) ++hypothesis_steps;
    tree.steps.push_back(Step{Direction::Deductive, ReasoningType::Unknown, rs.inputs, rs.output});
  }
  if (hypothesis_steps > 1) throw Error(ErrorKind::MultipleRoots, "hypothesis is concluded more than once");
  for (auto& [id, f] : used_leaves) tree.leaves.push_back(f);
  for (auto& [id, f] : ints) tree.intermediates.push_back(f);
  sort_facts(tree.leaves);
  sort_facts(tree.intermediates);

  auto violations = validate_tree(tree, nullptr);
  if (!violations.empty()) {
    auto has = [&](ViolationKind k) {
      return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == k; });
    };
    std::string detail = std::string(to_string(violations.front().kind)) + " " + violations.front().detail;
    if (has(ViolationKind::Cycle)) throw Error(ErrorKind::CyclicProof, detail);
    if (has(ViolationKind::MultipleRoots) || has(ViolationKind::MissingRoot) || has(ViolationKind::Disconnected)) {
      throw Error(ErrorKind::MultipleRoots, detail);
    }
    throw Error(ErrorKind::MalformedStep, detail);
  }
  return tree;
}

std::vector<Step> topological_steps(const EntailmentTree& tree) {
  auto cmp = [](const Step* a, const Step* b) { return id_less(b->output, a->output); };
  std::priority_queue<const Step*, std::vector<const Step*>, decltype(cmp)> ready(cmp);
  std::map<std::string, int> pending;
  std::map<std::string, std::vector<const Step*>> consumers;
  std::set<std::string> produced;
  for (const auto& s : tree.steps) produced.insert(s.output);
  for (const auto& s : tree.steps) {
    int n = 0;
    for (const auto& in : s.inputs) {
      if (produced.count(in)) {
        ++n;
        consumers[in].push_back(&s);
      }
    }
    pending[s.output] = n;
    if (n == 0) ready.push(&s);
  }
  std::vector<Step> out;
  while (!ready.empty()) {
    const Step* s = ready.top();
    ready.pop();
    out.push_back(*s);
    for (const Step* c : consumers[s->output]) {
      if (--pending[c->output] == 0) ready.push(c);
    }
  }
  return out;
}

std::string serialize_tree(const EntailmentTree& tree) {
  std::string out;
  for (const Step& s : topological_steps(tree)) {
    std::vector<std::string> inputs = s.inputs;
    sort_ids(inputs);
    if (!out.empty()) out += " ";
    for (size_t i = 0; i < inputs.size(); ++i) {
      if (i) out += " & ";
      out += inputs[i];
    }
    out += " -> " + s.output;
    if (s.output != tree.root_id) {
      const Fact* f = tree.find(s.output);
      out += ": " + (f ? f->text : std::string());
    }
    out += ";";
  }
  return out;
}

EntailmentTree prune_to_root(const EntailmentTree& tree) {
  std::map<std::string, const Step*> by_output;
  for (const auto& s : tree.steps) by_output.emplace(s.output, &s);
  std::set<std::string> reach;
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
  EntailmentTree out;
  out.hypothesis = tree.hypothesis;
  out.root_id = tree.root_id;
  for (const auto& s : tree.steps) {
    if (reach.count(s.output)) out.steps.push_back(s);
  }
  for (const auto& f : tree.leaves) {
    if (reach.count(f.id)) out.leaves.push_back(f);
  }
  for (const auto& f : tree.intermediates) {
    if (reach.count(f.id)) out.intermediates.push_back(f);
  }
  return out;
}

EntailmentTree canonicalize(const EntailmentTree& tree) {
  std::map<std::string, const Step*> by_output;
  for (const auto& s : tree.steps) by_output.emplace(s.output, &s);

  std::map<std::string, std::string> min_leaf;
  std::function<std::string(const std::string&)> key_of = [&](const std::string& id) -> std::string {
    auto memo = min_leaf.find(id);
    if (memo != min_leaf.end()) return memo->second;
    auto it = by_output.find(id);
    std::string best = id;
    if (it != by_output.end()) {
      bool first = true;
      for (const auto& in : it->second->inputs) {
        std::string k = key_of(in);
        if (first || id_less(k, best)) best = k;
        first = false;
      }
    }
    min_leaf[id] = best;
    return best;
  };

  std::map<std::string, std::string> renamed;
  long next = 1;
  std::set<std::string> done;
  std::function<void(const std::string&)> visit = [&](const std::string& id) {
    if (done.count(id)) return;
    done.insert(id);
    auto it = by_output.find(id);
    if (it == by_output.end()) return;
    std::vector<std::string> children = it->second->inputs;
    std::sort(children.begin(), children.end(), [&](const auto& a, const auto& b) {
      std::string ka = key_of(a);
      std::string kb = key_of(b);
      if (ka != kb) return id_less(ka, kb);
      return id_less(a, b);
    });
    for (const auto& c : children) visit(c);
    if (id != tree.root_id && role_of(id) == FactRole::Intermediate) renamed[id] = intermediate_id(next++);
  };
  visit(tree.root_id);

  auto rename = [&](const std::string& id) {
    auto it = renamed.find(id);
    return it == renamed.end() ? id : it->second;
  };
  EntailmentTree pruned = prune_to_root(tree);
  EntailmentTree out;
  out.hypothesis = pruned.hypothesis;
  out.root_id = pruned.root_id;
  out.leaves = pruned.leaves;
  for (auto f : pruned.intermediates) {
    f.id = rename(f.id);
    out.intermediates.push_back(std::move(f));
  }
  for (auto s : pruned.steps) {
    for (auto& in : s.inputs) in = rename(in);
    sort_ids(s.inputs);
    s.output = rename(s.output);
    out.steps.push_back(std::move(s));
  }
  sort_facts(out.intermediates);
  std::sort(out.steps.begin(), out.steps.end(), [](const Step& a, const Step& b) { return id_less(a.output, b.output); });
  return out;
}

EntailmentTree binarize(const EntailmentTree& tree) {
  EntailmentTree out = tree;
  out.steps.clear();
  long next = 0;
  for (const auto& f : tree.intermediates) next = std::max(next, id_number(f.id));
  for (const auto& s : tree.steps) {
    if (s.inputs.size() <= 2) {
      out.steps.push_back(s);
      continue;
    }
    std::vector<std::string> inputs = s.inputs;
    sort_ids(inputs);
    std::string acc = inputs[0];
    std::string acc_text = tree.find(acc) ? tree.find(acc)->text : std::string();
    for (size_t i = 1; i < inputs.size(); ++i) {
      const Fact* f = tree.find(inputs[i]);
      std::string text = acc_text + " and " + (f ? f->text : std::string());
      std::string out_id = (i + 1 == inputs.size()) ? s.output : intermediate_id(++next);
      out.steps.push_back(Step{s.direction, s.rtype, {acc, inputs[i]}, out_id});
      if (i + 1 != inputs.size()) out.intermediates.push_back(Fact{out_id, text, std::nullopt});
      acc = out_id;
      acc_text = text;
    }
  }
  sort_facts(out.intermediates);
  return out;
}

}  // namespace metgen
