#pragma once

// Independent reference implementations used as test oracles.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "metgen/model.hpp"
#include "metgen/symbolic.hpp"

namespace oracle {

using metgen::ReasoningType;
using metgen::SymbolicFact;

inline std::vector<std::string> tokens(const std::string& key) {
  std::string spaced;
  for (char c : key) {
    if (c == '(' || c == ')') {
      spaced += ' ';
      spaced += c;
      spaced += ' ';
    } else {
      spaced += c;
    }
  }
  std::istringstream in(spaced);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

// Entity tokens of a key, each tagged with whether it sits in an isa super slot.
struct Slot {
  size_t index;
  bool super;
};

inline std::vector<Slot> entity_slots(const std::vector<std::string>& toks) {
  std::vector<Slot> out;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (toks[i] == "atom") {
      for (size_t j = i + 2; j < toks.size() && toks[j] != ")"; ++j) out.push_back({j, false});
    } else if (toks[i] == "isa") {
      out.push_back({i + 1, false});
      out.push_back({i + 2, true});
    }
  }
  return out;
}

inline std::string join(const std::vector<std::string>& toks) {
  std::string s;
  for (const auto& t : toks) {
    if (!s.empty() && s.back() != '(' && t != ")") s += ' ';
    s += t;
  }
  return s;
}

inline std::optional<SymbolicFact> naive_substitution(const SymbolicFact& rule, const SymbolicFact& f) {
  auto rt = tokens(rule.key());
  if (rt.size() != 5 || rt[1] != "isa") return std::nullopt;
  std::string x = rt[2];
  std::string y = rt[3];
  if (x == y) return std::nullopt;
  auto ft = tokens(f.key());
  auto slots = entity_slots(ft);
  bool has_y = false;
  for (const auto& s : slots) {
    if (ft[s.index] == x) return std::nullopt;
    if (ft[s.index] == y && !s.super) has_y = true;
  }
  if (!has_y) return std::nullopt;
  for (const auto& s : slots) {
    if (ft[s.index] == y && !s.super) ft[s.index] = x;
  }
  SymbolicFact out = SymbolicFact::parse(join(ft));
  if (out.key() == rule.key() || out.key() == f.key()) return std::nullopt;
  auto ot = tokens(out.key());
  if (ot.size() == 5 && ot[1] == "isa" && ot[2] == ot[3]) return std::nullopt;
  return out;
}

// Subject per the conjunction rule, computed from the token stream.
inline std::optional<std::vector<std::string>> naive_subject(const SymbolicFact& f) {
  auto t = tokens(f.key());
  if (t[1] == "atom") {
    std::vector<std::string> args(t.begin() + 3, t.end() - 1);
    if (args.empty()) return std::nullopt;
    return args;
  }
  if (t[1] == "and") {
    auto l = naive_subject(f.left());
    auto r = naive_subject(f.right());
    if (l && r && *l == *r) return l;
  }
  return std::nullopt;
}

// Reference deduce: both premise orders, same rejection rules.
inline std::optional<SymbolicFact> naive_deduce(ReasoningType t, const SymbolicFact& a, const SymbolicFact& b) {
  switch (t) {
    case ReasoningType::Substitution: {
      auto x = naive_substitution(a, b);
      auto y = naive_substitution(b, a);
      if (x && y && x->key() != y->key()) return std::nullopt;
      return x ? x : y;
    }
    case ReasoningType::Conjunction: {
      if (a.key() == b.key()) return std::nullopt;
      auto sa = naive_subject(a);
      auto sb = naive_subject(b);
      if (!sa || !sb || *sa != *sb) return std::nullopt;
      return SymbolicFact::parse("(and " + std::min(a.key(), b.key()) + " " + std::max(a.key(), b.key()) + ")");
    }
    case ReasoningType::IfThen: {
      for (const auto* pr : {&a, &b}) {
        const SymbolicFact& rule = *pr;
        const SymbolicFact& other = pr == &a ? b : a;
        if (rule.kind() != SymbolicFact::Kind::Implies) continue;
        if (rule.antecedent().key() != other.key()) continue;
        if (rule.consequent().key() == other.key()) continue;
        return rule.consequent();
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

// Every m in `pool` plus the structural completions for which
// naive_deduce(t, m, premise) == conclusion.
inline std::set<std::string> completions(ReasoningType t, const SymbolicFact& conclusion, const SymbolicFact& premise,
                                         const std::vector<SymbolicFact>& pool) {
  std::vector<SymbolicFact> cands = pool;
  cands.push_back(SymbolicFact::implies(premise, conclusion));
  if (premise.kind() == SymbolicFact::Kind::Implies) cands.push_back(premise.antecedent());
  if (conclusion.kind() == SymbolicFact::Kind::Conj) {
    cands.push_back(conclusion.left());
    cands.push_back(conclusion.right());
  }
  std::set<std::string> out;
  for (const auto& m : cands) {
    auto c = naive_deduce(t, m, premise);
    if (c && c->key() == conclusion.key()) out.insert(m.key());
  }
  return out;
}

// NDCG with binary gains over an ordering, normalized by the best ordering
// found by trying every permutation of the labels.
struct Rank {
  double p_at_1;
  double ndcg;
};

inline double dcg(const std::vector<bool>& labels) {
  double s = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) s += (labels[i] ? 1.0 : 0.0) / std::log2(static_cast<double>(i) + 2.0);
  return s;
}

inline Rank brute_rank(const std::vector<bool>& labels) {
  std::vector<int> perm(labels.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  double best = 0.0;
  do {
    std::vector<bool> l;
    for (int i : perm) l.push_back(labels[i]);
    best = std::max(best, dcg(l));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {labels.empty() || !labels[0] ? 0.0 : 1.0, dcg(labels) / best};
}

// Closed-form losses written out term by term.
inline double hinge(double pos, double neg, double m) { return std::max(0.0, neg - pos + m); }

}  // namespace oracle
