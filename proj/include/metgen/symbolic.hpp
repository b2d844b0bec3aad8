#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metgen {

// Structured form of a knowledge sentence over a finite entity/predicate
// alphabet. Values are immutable and cheap to copy (shared nodes).
//
//   Atom(P, [x, ...])   "x P ..."
//   IsA(x, y)           "x is a kind of y"
//   Implies(A, B)       "if A then B"
//   Conj(A, B)          "A and B", stored with key(A) <= key(B)
class SymbolicFact {
 public:
  enum class Kind { Atom, IsA, Implies, Conj };

  static SymbolicFact atom(std::string predicate, std::vector<std::string> args);
  static SymbolicFact is_a(std::string sub, std::string super);
  static SymbolicFact implies(SymbolicFact antecedent, SymbolicFact consequent);
  static SymbolicFact conj(SymbolicFact a, SymbolicFact b);

  // Parses the canonical s-expression produced by key().
  static SymbolicFact parse(std::string_view text);

  Kind kind() const { return node_->kind; }
  const std::string& predicate() const { return node_->name; }
  // Atom arguments, or {sub, super} for IsA.
  std::span<const std::string> args() const { return node_->args; }
  const std::string& sub() const { return node_->args.at(0); }
  const std::string& super() const { return node_->args.at(1); }
  const SymbolicFact& left() const { return node_->children.at(0); }
  const SymbolicFact& right() const { return node_->children.at(1); }
  const SymbolicFact& antecedent() const { return left(); }
  const SymbolicFact& consequent() const { return right(); }

  // Deterministic serialization, e.g. "(implies (atom glows lamp) (isa lamp object))".
  const std::string& key() const { return node_->key; }

  // English-like template rendering.
  std::string render() const;

  // Every entity occurrence (any position), in traversal order.
  std::vector<std::string> entities() const;
  // Predicates and entities, with repetition.
  std::vector<std::string> symbols() const;

  bool mentions_entity(std::string_view entity) const;
  // True when `entity` occurs somewhere other than the super slot of an IsA.
  bool mentions_substitutable(std::string_view entity) const;
  // Replaces every substitutable occurrence of `from` by `to`.
  SymbolicFact substitute(std::string_view from, std::string_view to) const;

  friend bool operator==(const SymbolicFact& a, const SymbolicFact& b) {
    return a.node_ == b.node_ || a.key() == b.key();
  }
  friend bool operator<(const SymbolicFact& a, const SymbolicFact& b) { return a.key() < b.key(); }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<std::string> args;
    std::vector<SymbolicFact> children;
    std::string key;
  };
  explicit SymbolicFact(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static SymbolicFact make(Node node);

  std::shared_ptr<const Node> node_;
};

// Subject used by the conjunction rule: the argument tuple of an Atom or the
// common subject of both conjuncts. IsA and Implies have none.
std::vector<std::string> subject_of(const SymbolicFact& fact);

}  // namespace metgen
