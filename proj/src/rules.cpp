#include "metgen/rules.hpp"

#include <algorithm>
#include <set>

#include "metgen/errors.hpp"

namespace metgen {

namespace {

std::optional<SymbolicFact> substitute_with(const SymbolicFact& rule, const SymbolicFact& target) {
  if (rule.kind() != SymbolicFact::Kind::IsA) return std::nullopt;
  const std::string& x = rule.sub();
  const std::string& y = rule.super();
  if (x == y) return std::nullopt;
  if (!target.mentions_substitutable(y) || target.mentions_entity(x)) return std::nullopt;
  SymbolicFact out = target.substitute(y, x);
  if (out == rule || out == target) return std::nullopt;
  if (out.kind() == SymbolicFact::Kind::IsA && out.sub() == out.super()) return std::nullopt;
  return out;
}

std::optional<SymbolicFact> modus_ponens(const SymbolicFact& rule, const SymbolicFact& fact) {
  if (rule.kind() != SymbolicFact::Kind::Implies) return std::nullopt;
  if (!(rule.antecedent() == fact)) return std::nullopt;
  if (rule.consequent() == fact) return std::nullopt;
  return rule.consequent();
}

}  // namespace

std::optional<SymbolicFact> deduce(ReasoningType rtype, const SymbolicFact& p1, const SymbolicFact& p2) {
  switch (rtype) {
    case ReasoningType::Substitution: {
      auto a = substitute_with(p1, p2);
      auto b = substitute_with(p2, p1);
      if (a && b && !(*a == *b)) return std::nullopt;
      return a ? a : b;
    }
    case ReasoningType::Conjunction: {
      if (p1 == p2) return std::nullopt;
      auto subj = subject_of(p1);
      if (subj.empty() || subj != subject_of(p2)) return std::nullopt;
      return SymbolicFact::conj(p1, p2);
    }
    case ReasoningType::IfThen: {
      auto a = modus_ponens(p1, p2);
      return a ? a : modus_ponens(p2, p1);
    }
    case ReasoningType::Unknown:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<SymbolicFact> abduce(ReasoningType rtype, const SymbolicFact& conclusion, const SymbolicFact& premise) {
  std::vector<SymbolicFact> candidates;
  switch (rtype) {
    case ReasoningType::Substitution:
      if (premise.kind() == SymbolicFact::Kind::IsA) {
        // premise IsA(x, y) acts as the rule: conclusion F[x] came from F[y].
        candidates.push_back(conclusion.substitute(premise.sub(), premise.super()));
      }
      {
        // premise F[y] was rewritten by a missing IsA(x, y) into conclusion F[x].
        auto known = premise.entities();
        std::set<std::string> in_premise(known.begin(), known.end());
        std::set<std::string> fresh;
        for (const auto& e : conclusion.entities()) {
          if (!in_premise.count(e)) fresh.insert(e);
        }
        for (const auto& x : fresh) {
          for (const auto& y : in_premise) candidates.push_back(SymbolicFact::is_a(x, y));
        }
      }
      break;
    case ReasoningType::Conjunction:
      if (conclusion.kind() == SymbolicFact::Kind::Conj) {
        if (conclusion.left() == premise) candidates.push_back(conclusion.right());
        if (conclusion.right() == premise) candidates.push_back(conclusion.left());
      }
      break;
    case ReasoningType::IfThen:
      // A rule premise concluding the target fixes the missing fact to its
      // antecedent; otherwise the missing fact is the rule itself.
      if (premise.kind() == SymbolicFact::Kind::Implies && premise.consequent() == conclusion) {
        candidates.push_back(premise.antecedent());
      } else {
        candidates.push_back(SymbolicFact::implies(premise, conclusion));
      }
      break;
    case ReasoningType::Unknown:
      break;
  }
  std::set<std::string> seen;
  std::optional<SymbolicFact> found;
  for (const auto& m : candidates) {
    auto c = deduce(rtype, m, premise);
    if (!c || !(*c == conclusion)) continue;
    if (!seen.insert(m.key()).second) continue;
    if (found) return std::nullopt;
    found = m;
  }
  return found;
}

std::optional<ReasoningType> classify_step(const SymbolicFact& p1, const SymbolicFact& p2, const SymbolicFact& c) {
  std::optional<ReasoningType> found;
  for (ReasoningType t : kReasoningTypes) {
    auto out = deduce(t, p1, p2);
    if (!out || !(*out == c)) continue;
    if (found) {
      throw Error(ErrorKind::AmbiguousType, std::string(to_string(*found)) + " and " + std::string(to_string(t)) +
                                                " both reproduce " + c.key());
    }
    found = t;
  }
  return found;
}

bool shares_symbol(const SymbolicFact& a, const SymbolicFact& b) {
  auto sa = a.symbols();
  std::set<std::string> set_a(sa.begin(), sa.end());
  for (const auto& s : b.symbols()) {
    if (set_a.count(s)) return true;
  }
  return false;
}

}  // namespace metgen
