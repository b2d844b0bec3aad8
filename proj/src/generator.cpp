#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "metgen/dataio.hpp"
#include "metgen/errors.hpp"
#include "metgen/judge.hpp"
#include "metgen/proof_format.hpp"
#include "metgen/rules.hpp"

namespace metgen {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Pronounceable CVCV names, none of them a stopword.
const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> pool = [] {
    const std::string cons = "bdfgklmnprstvz";
    const std::string vows = "aeiou";
    std::vector<std::string> words;
    for (char c1 : cons)
      for (char v1 : vows)
        for (char c2 : cons)
          for (char v2 : vows) {
            std::string w{c1, v1, c2, v2};
            if (content_tokens(w) == std::vector<std::string>{w}) words.push_back(w);
          }
    std::vector<std::string> out;
    out.reserve(words.size());
    for (size_t i = 0; i < words.size(); ++i) out.push_back(words[(i * 7919) % words.size()]);
    return out;
  }();
  return pool;
}

struct Alphabet {
  std::vector<std::string> entities;
  std::vector<std::string> predicates;
};

struct Alphabets {
  Alphabet tree;
  Alphabet distractor;
};

Alphabets make_alphabets(const GeneratorConfig& c) {
  const auto& pool = word_pool();
  size_t need = 2 * static_cast<size_t>(c.n_entities + c.n_predicates);
  if (need > pool.size()) throw Error(ErrorKind::ConfigError, "alphabet sizes exceed the name pool");
  Alphabets a;
  size_t k = 0;
  for (int i = 0; i < c.n_entities; ++i) a.tree.entities.push_back(pool[k++]);
  for (int i = 0; i < c.n_predicates; ++i) a.tree.predicates.push_back(pool[k++]);
  for (int i = 0; i < c.n_entities; ++i) a.distractor.entities.push_back(pool[k++]);
  for (int i = 0; i < c.n_predicates; ++i) a.distractor.predicates.push_back(pool[k++]);
  return a;
}

void check_config(const GeneratorConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::ConfigError, m); };
  if (c.n_instances < 0) fail("instance count must be nonnegative");
  if (c.min_depth < 1 || c.max_depth < c.min_depth) fail("depth range must satisfy 1 <= min <= max");
  if (c.max_depth > 8) fail("depth above 8 is not supported");
  if (c.n_entities < 2 * c.max_depth + 4) fail("entity alphabet too small for the requested depth");
  if (c.n_predicates < 2 * c.max_depth + 2) fail("predicate alphabet too small for the requested depth");
  if (c.min_distractors < 0 || c.max_distractors < c.min_distractors) fail("distractor range is invalid");
  if (!(c.hard_fraction >= 0.0 && c.hard_fraction <= 1.0)) fail("hard fraction must lie in [0, 1]");
  if (c.weight_substitution < 0 || c.weight_conjunction < 0 || c.weight_ifthen < 0 ||
      c.weight_substitution + c.weight_ifthen <= 0) {
    fail("rule weights must be nonnegative with substitution or if-then positive");
  }
}

struct Node {
  SymbolicFact sym;
  std::vector<int> children;
  ReasoningType rtype = ReasoningType::Unknown;
};

class TreeBuilder {
 public:
  TreeBuilder(const GeneratorConfig& config, const Alphabet& alphabet, Rng& rng)
      : config_(config), rng_(rng) {
    free_entities_ = alphabet.entities;
    free_predicates_ = alphabet.predicates;
    rng_.shuffle(free_entities_);
    rng_.shuffle(free_predicates_);
  }

  std::optional<std::vector<Node>> build(int depth) {
    int arity = 1 + static_cast<int>(rng_.below(2));
    std::vector<std::string> args;
    for (int i = 0; i < arity; ++i) args.push_back(fresh_entity());
    h_entities_ = args;
    SymbolicFact h = SymbolicFact::atom(fresh_predicate(), args);
    h_symbols_ = {};
    for (const auto& s : h.symbols()) h_symbols_.insert(s);

    nodes_.clear();
    nodes_.push_back(Node{h, {}, ReasoningType::Unknown});
    std::vector<int> open{0};
    for (int step = 0; step < depth; ++step) {
      std::vector<int> order = open;
      rng_.shuffle(order);
      bool expanded = false;
      for (int idx : order) {
        if (expand(idx)) {
          open.erase(std::find(open.begin(), open.end(), idx));
          for (int c : nodes_[idx].children) open.push_back(c);
          expanded = true;
          break;
        }
      }
      if (!expanded) return std::nullopt;
    }
    return nodes_;
  }

 private:
  std::string fresh_entity() {
    std::string e = free_entities_.back();
    free_entities_.pop_back();
    return e;
  }
  std::string fresh_predicate() {
    std::string p = free_predicates_.back();
    free_predicates_.pop_back();
    return p;
  }

  bool touches_h(const SymbolicFact& f) const {
    for (const auto& s : f.symbols()) {
      if (h_symbols_.count(s)) return true;
    }
    return false;
  }

  void attach(int idx, ReasoningType t, SymbolicFact a, SymbolicFact b) {
    int ia = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{std::move(a), {}, ReasoningType::Unknown});
    nodes_.push_back(Node{std::move(b), {}, ReasoningType::Unknown});
    nodes_[idx].children = {ia, ia + 1};
    nodes_[idx].rtype = t;
  }

  bool expand(int idx) {
    const SymbolicFact goal = nodes_[idx].sym;
    if (goal.kind() == SymbolicFact::Kind::Conj && config_.weight_conjunction > 0) {
      auto c = deduce(ReasoningType::Conjunction, goal.left(), goal.right());
      if (c && *c == goal) {
        attach(idx, ReasoningType::Conjunction, goal.left(), goal.right());
        return true;
      }
    }
    std::vector<std::string> sub_choices;
    if (config_.weight_substitution > 0 && free_entities_.size() >= 1) {
      for (const auto& x : h_entities_) {
        if (!goal.mentions_substitutable(x)) continue;
        if (std::find(sub_choices.begin(), sub_choices.end(), x) == sub_choices.end()) sub_choices.push_back(x);
      }
    }
    bool ifthen_ok = config_.weight_ifthen > 0 && free_predicates_.size() >= 2;
    double ws = sub_choices.empty() ? 0.0 : config_.weight_substitution;
    double wi = ifthen_ok ? config_.weight_ifthen : 0.0;
    if (ws + wi <= 0.0) return false;

    if (rng_.unit() * (ws + wi) < ws) {
      const std::string x = rng_.pick(sub_choices);
      const std::string y = fresh_entity();
      SymbolicFact f = goal.substitute(x, y);
      SymbolicFact rule = SymbolicFact::is_a(x, y);
      auto c = deduce(ReasoningType::Substitution, rule, f);
      if (!c || !(*c == goal) || !touches_h(f)) return false;
      attach(idx, ReasoningType::Substitution, rule, f);
      return true;
    }
    const std::string e = rng_.pick(h_entities_);
    SymbolicFact antecedent = SymbolicFact::atom(fresh_predicate(), {e});
    double wc = config_.weight_conjunction;
    if (wc > 0 && rng_.unit() * (wc + config_.weight_ifthen) < wc) {
      antecedent = SymbolicFact::conj(antecedent, SymbolicFact::atom(fresh_predicate(), {e}));
    }
    SymbolicFact rule = SymbolicFact::implies(antecedent, goal);
    auto c = deduce(ReasoningType::IfThen, rule, antecedent);
    if (!c || !(*c == goal)) return false;
    attach(idx, ReasoningType::IfThen, rule, antecedent);
    return true;
  }

  const GeneratorConfig& config_;
  Rng& rng_;
  std::vector<std::string> free_entities_;
  std::vector<std::string> free_predicates_;
  std::vector<std::string> h_entities_;
  std::set<std::string> h_symbols_;
  std::vector<Node> nodes_;
};

bool fires_any(const SymbolicFact& a, const SymbolicFact& b) {
  for (ReasoningType t : kReasoningTypes) {
    if (deduce(t, a, b)) return true;
  }
  return false;
}

// True when two nodes that can appear together in a forward state (neither
// derives from the other) fire a rule other than their own gold step.
bool has_dead_end(const std::vector<Node>& nodes) {
  std::vector<int> parent(nodes.size(), -1);
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (int c : nodes[i].children) parent[c] = static_cast<int>(i);
  }
  auto ancestor = [&](int a, int b) {
    for (int p = parent[b]; p >= 0; p = parent[p]) {
      if (p == a) return true;
    }
    return false;
  };
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (size_t j = i + 1; j < nodes.size(); ++j) {
      int a = static_cast<int>(i);
      int b = static_cast<int>(j);
      if (ancestor(a, b) || ancestor(b, a)) continue;
      bool siblings = parent[a] >= 0 && parent[a] == parent[b];
      for (ReasoningType t : kReasoningTypes) {
        if (siblings && t == nodes[parent[a]].rtype) continue;
        if (deduce(t, nodes[i].sym, nodes[j].sym)) return true;
      }
    }
  }
  return false;
}

std::vector<SymbolicFact> normal_distractors(int count, const Alphabet& alphabet, Rng& rng) {
  std::vector<std::string> ents = alphabet.entities;
  std::vector<std::string> preds = alphabet.predicates;
  rng.shuffle(ents);
  rng.shuffle(preds);
  ents.resize(std::min<size_t>(ents.size(), 6));
  preds.resize(std::min<size_t>(preds.size(), 6));
  auto atom = [&] {
    if (rng.below(2) == 0) return SymbolicFact::atom(rng.pick(preds), {rng.pick(ents)});
    std::string a = rng.pick(ents);
    std::string b = rng.pick(ents);
    if (a == b) return SymbolicFact::atom(rng.pick(preds), {a});
    return SymbolicFact::atom(rng.pick(preds), {a, b});
  };
  std::vector<SymbolicFact> out;
  std::set<std::string> seen;
  int guard = 0;
  while (static_cast<int>(out.size()) < count && guard++ < 1000) {
    std::uint64_t kind = rng.below(20);
    SymbolicFact f = atom();
    if (kind < 4) {
      std::string a = rng.pick(ents);
      std::string b = rng.pick(ents);
      if (a == b) continue;
      f = SymbolicFact::is_a(a, b);
    } else if (kind < 7) {
      f = SymbolicFact::implies(atom(), atom());
    } else if (kind < 10) {
      std::string e = rng.pick(ents);
      std::string p = rng.pick(preds);
      std::string q = rng.pick(preds);
      if (p == q) continue;
      f = SymbolicFact::conj(SymbolicFact::atom(p, {e}), SymbolicFact::atom(q, {e}));
    }
    if (seen.insert(f.key()).second) out.push_back(f);
  }
  return out;
}

// Atoms over a few shared (hypothesis entity, distractor entity) subjects.
// Atoms on the same subject conjoin with each other, but none fires a rule
// with a gold node.
std::vector<SymbolicFact> hard_distractors(int count, const std::vector<std::string>& h_entities,
                                           const Alphabet& alphabet, const std::vector<SymbolicFact>& gold,
                                           Rng& rng) {
  std::vector<std::vector<std::string>> subjects;
  int n_subjects = std::max(1, std::min(3, count / 3));
  for (int i = 0; i < n_subjects; ++i) {
    std::string h = rng.pick(h_entities);
    std::string d = rng.pick(alphabet.entities);
    subjects.push_back(rng.below(2) == 0 ? std::vector<std::string>{h, d} : std::vector<std::string>{d, h});
  }
  std::vector<SymbolicFact> out;
  std::set<std::string> seen;
  for (const auto& f : gold) seen.insert(f.key());
  int guard = 0;
  while (static_cast<int>(out.size()) < count && guard++ < 500) {
    SymbolicFact f = SymbolicFact::atom(rng.pick(alphabet.predicates), rng.pick(subjects));
    if (seen.count(f.key())) continue;
    if (std::any_of(gold.begin(), gold.end(), [&](const SymbolicFact& o) { return fires_any(f, o) || fires_any(o, f); }))
      continue;
    seen.insert(f.key());
    out.push_back(f);
  }
  return out;
}

}  // namespace

long count_proofs(const std::vector<SymbolicFact>& leaves, const SymbolicFact& goal, long cap) {
  size_t n = leaves.size();
  if (n == 0 || n > 16) return n == 0 ? 0 : cap;
  size_t full = (size_t{1} << n);
  std::vector<std::map<std::string, std::pair<SymbolicFact, long>>> derived(full);
  for (size_t i = 0; i < n; ++i) derived[size_t{1} << i].emplace(leaves[i].key(), std::make_pair(leaves[i], 1L));
  std::vector<size_t> masks;
  for (size_t m = 1; m < full; ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](size_t a, size_t b) { return __builtin_popcountll(a) < __builtin_popcountll(b); });
  long total = 0;
  for (size_t m : masks) {
    size_t low = m & (~m + 1);
    for (size_t a = (m - 1) & m; a > 0; a = (a - 1) & m) {
      if (!(a & low)) continue;
      size_t b = m ^ a;
      if (b == 0) continue;
      for (const auto& [ka, fa] : derived[a]) {
        for (const auto& [kb, fb] : derived[b]) {
          for (ReasoningType t : kReasoningTypes) {
            auto c = deduce(t, fa.first, fb.first);
            if (!c) continue;
            auto [it, inserted] = derived[m].emplace(c->key(), std::make_pair(*c, 0L));
            it->second.second = std::min(cap, it->second.second + fa.second * fb.second);
          }
        }
      }
    }
    auto it = derived[m].find(goal.key());
    if (it != derived[m].end()) total = std::min(cap, total + it->second.second);
  }
  return total;
}

ProblemInstance generate_instance(const GeneratorConfig& config, std::uint64_t index) {
  check_config(config);
  Alphabets alphabets = make_alphabets(config);
  Rng rng(splitmix64(config.seed ^ splitmix64(index + 0x51ed2701ULL)));
  int depth = config.min_depth + static_cast<int>(rng.below(config.max_depth - config.min_depth + 1));

  for (int attempt = 0; attempt < 2000; ++attempt) {
    TreeBuilder builder(config, alphabets.tree, rng);
    auto nodes = builder.build(depth);
    if (!nodes) continue;
    const SymbolicFact& h = (*nodes)[0].sym;

    std::vector<int> leaf_idx;
    std::set<std::string> all_keys;
    bool distinct = true;
    for (size_t i = 0; i < nodes->size(); ++i) {
      if ((*nodes)[i].children.empty()) leaf_idx.push_back(static_cast<int>(i));
      distinct = distinct && all_keys.insert((*nodes)[i].sym.key()).second;
    }
    if (!distinct) continue;
    bool steps_ok = true;
    for (const auto& n : *nodes) {
      if (n.children.empty()) continue;
      const auto& a = (*nodes)[n.children[0]].sym;
      const auto& b = (*nodes)[n.children[1]].sym;
      try {
        steps_ok = steps_ok && classify_step(a, b, n.sym) == n.rtype;
      } catch (const Error&) {
        steps_ok = false;
      }
    }
    if (!steps_ok || has_dead_end(*nodes)) continue;
    std::vector<SymbolicFact> leaves;
    for (int i : leaf_idx) leaves.push_back((*nodes)[i].sym);
    if (std::any_of(leaves.begin(), leaves.end(), [&](const SymbolicFact& l) { return !shares_symbol(l, h); })) continue;
    if (count_proofs(leaves, h) != 1) continue;

    int n_distractors = config.min_distractors +
                        static_cast<int>(rng.below(config.max_distractors - config.min_distractors + 1));
    int n_hard = config.hard_distractors ? static_cast<int>(n_distractors * config.hard_fraction + 0.5) : 0;
    std::vector<SymbolicFact> distractors = normal_distractors(n_distractors - n_hard, alphabets.distractor, rng);
    if (n_hard > 0) {
      std::vector<SymbolicFact> gold;
      for (const auto& n : *nodes) gold.push_back(n.sym);
      std::vector<std::string> h_entities(h.args().begin(), h.args().end());
      auto hard = hard_distractors(n_hard, h_entities, alphabets.distractor, gold, rng);
      distractors.insert(distractors.end(), hard.begin(), hard.end());
    }
    bool clash = std::any_of(distractors.begin(), distractors.end(),
                             [&](const SymbolicFact& d) { return all_keys.count(d.key()) > 0; });
    if (clash) continue;

    // Shuffle leaves and distractors together, then number them.
    std::vector<std::pair<SymbolicFact, int>> pool;  // (fact, node index or -1)
    for (int i : leaf_idx) pool.emplace_back((*nodes)[i].sym, i);
    for (const auto& d : distractors) pool.emplace_back(d, -1);
    rng.shuffle(pool);

    ProblemInstance inst;
    inst.id = "synth-" + std::to_string(config.seed) + "-" + std::to_string(index);
    inst.task = Task::Task2;
    inst.hypothesis = Fact{std::string(kHypothesisId), h.render(), h};
    std::map<int, std::string> node_id;
    node_id[0] = std::string(kHypothesisId);
    EntailmentTree tree;
    tree.hypothesis = inst.hypothesis;
    for (size_t k = 0; k < pool.size(); ++k) {
      Fact f{leaf_id(static_cast<long>(k) + 1), pool[k].first.render(), pool[k].first};
      inst.facts.push_back(f);
      if (pool[k].second >= 0) {
        node_id[pool[k].second] = f.id;
        tree.leaves.push_back(f);
      }
    }
    long next_int = 0;
    for (size_t i = 1; i < nodes->size(); ++i) {
      if ((*nodes)[i].children.empty()) continue;
      node_id[static_cast<int>(i)] = intermediate_id(++next_int);
      const auto& s = (*nodes)[i].sym;
      tree.intermediates.push_back(Fact{node_id[static_cast<int>(i)], s.render(), s});
    }
    for (size_t i = 0; i < nodes->size(); ++i) {
      const Node& n = (*nodes)[i];
      if (n.children.empty()) continue;
      tree.steps.push_back(Step{Direction::Deductive, n.rtype, {node_id[n.children[0]], node_id[n.children[1]]},
                                node_id[static_cast<int>(i)]});
    }
    std::sort(tree.leaves.begin(), tree.leaves.end(), [](const Fact& a, const Fact& b) { return id_less(a.id, b.id); });
    tree = canonicalize(tree);
    if (!validate_tree(tree, &inst.facts).empty()) continue;
    inst.gold = std::move(tree);
    return inst;
  }
  throw Error(ErrorKind::ConfigError, "could not generate a unique-proof instance for index " + std::to_string(index));
}

std::vector<ProblemInstance> generate_synthetic(const GeneratorConfig& config) {
  check_config(config);
  std::vector<ProblemInstance> out;
  out.reserve(config.n_instances);
  for (int i = 0; i < config.n_instances; ++i) out.push_back(generate_instance(config, static_cast<std::uint64_t>(i)));
  return out;
}

}  // namespace metgen
