#include <doctest.h>

#include <map>
#include <set>

#include "metgen/dataio.hpp"
#include "metgen/errors.hpp"
#include "metgen/proof_format.hpp"
#include "metgen/rules.hpp"

using metgen::ReasoningType;
using metgen::SymbolicFact;

namespace {

std::map<std::string, SymbolicFact> symbols(const metgen::EntailmentTree& t) {
  std::map<std::string, SymbolicFact> m;
  for (const auto& f : t.leaves) m.emplace(f.id, *f.sym);
  for (const auto& f : t.intermediates) m.emplace(f.id, *f.sym);
  m.emplace(t.hypothesis.id, *t.hypothesis.sym);
  return m;
}

std::vector<SymbolicFact> gold_nodes(const metgen::EntailmentTree& t) {
  std::vector<SymbolicFact> out;
  for (const auto& [id, s] : symbols(t)) {
    if (id != t.root_id) out.push_back(s);
  }
  return out;
}

constexpr ReasoningType kRules[] = {ReasoningType::Substitution, ReasoningType::Conjunction, ReasoningType::IfThen};

}  // namespace

TEST_CASE("depth one yields a single two-premise step") {
  metgen::GeneratorConfig gc;
  gc.n_instances = 20;
  gc.min_depth = gc.max_depth = 1;
  for (const auto& inst : metgen::generate_synthetic(gc)) {
    REQUIRE(inst.gold);
    CHECK(inst.gold->steps.size() == 1);
    CHECK(inst.gold->leaves.size() == 2);
    CHECK(inst.gold->intermediates.empty());
  }
}

TEST_CASE("generation is deterministic per seed and index") {
  metgen::GeneratorConfig gc;
  gc.n_instances = 30;
  gc.seed = 99;
  auto a = metgen::generate_synthetic(gc);
  auto b = metgen::generate_synthetic(gc);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(metgen::instance_to_json(a[i]).dump() == metgen::instance_to_json(b[i]).dump());
    CHECK(metgen::instance_to_json(metgen::generate_instance(gc, i)).dump() == metgen::instance_to_json(a[i]).dump());
  }
  gc.seed = 100;
  auto c = metgen::generate_synthetic(gc);
  int differ = 0;
  for (size_t i = 0; i < a.size(); ++i) differ += metgen::instance_to_json(a[i]).dump() != metgen::instance_to_json(c[i]).dump();
  CHECK(differ > 0);
}

TEST_CASE("gold trees are valid, rule-reproducible and unique") {
  metgen::GeneratorConfig gc;
  gc.n_instances = 200;
  std::set<size_t> depths;
  for (const auto& inst : metgen::generate_synthetic(gc)) {
    const auto& t = *inst.gold;
    CHECK(metgen::validate_tree(t, inst.facts).empty());
    auto sym = symbols(t);
    for (const auto& s : t.steps) {
      REQUIRE(s.inputs.size() == 2);
      const auto& p1 = sym.at(s.inputs[0]);
      const auto& p2 = sym.at(s.inputs[1]);
      const auto& out = sym.at(s.output);
      auto d = metgen::deduce(s.rtype, p1, p2);
      REQUIRE(d);
      CHECK(d->key() == out.key());
      CHECK(metgen::classify_step(p1, p2, out) == s.rtype);
    }
    std::vector<SymbolicFact> leaves;
    for (const auto& f : t.leaves) leaves.push_back(*f.sym);
    CHECK(metgen::count_proofs(leaves, *t.hypothesis.sym) == 1);
    for (const auto& f : t.leaves) CHECK(metgen::shares_symbol(f.sym.value(), *t.hypothesis.sym));
    depths.insert(t.steps.size());
  }
  CHECK(depths.size() > 1);
}

TEST_CASE("normal distractors are symbol-disjoint from the gold tree") {
  metgen::GeneratorConfig gc;
  gc.n_instances = 100;
  for (const auto& inst : metgen::generate_synthetic(gc)) {
    auto d = metgen::distractors_of(inst);
    CHECK(d.size() >= static_cast<size_t>(gc.min_distractors));
    CHECK(d.size() <= static_cast<size_t>(gc.max_distractors));
    for (const auto& f : d) {
      for (const auto& [id, g] : symbols(*inst.gold)) CHECK_FALSE(metgen::shares_symbol(*f.sym, g));
    }
  }
}

TEST_CASE("hard distractors share an entity but fire nothing with gold nodes") {
  metgen::GeneratorConfig gc;
  gc.n_instances = 100;
  gc.hard_distractors = true;
  int hard = 0;
  int conjoinable = 0;
  for (const auto& inst : metgen::generate_synthetic(gc)) {
    const auto& t = *inst.gold;
    auto gold = gold_nodes(t);
    auto d = metgen::distractors_of(inst);
    std::vector<SymbolicFact> shared;
    for (const auto& f : d) {
      if (!metgen::shares_symbol(*f.sym, *t.hypothesis.sym)) continue;
      shared.push_back(*f.sym);
      ++hard;
      for (const auto& g : gold) {
        for (auto r : kRules) {
          CHECK_FALSE(metgen::deduce(r, *f.sym, g));
          CHECK_FALSE(metgen::deduce(r, g, *f.sym));
        }
      }
    }
    for (size_t i = 0; i < shared.size(); ++i) {
      for (size_t j = i + 1; j < shared.size(); ++j) conjoinable += metgen::deduce(ReasoningType::Conjunction, shared[i], shared[j]).has_value();
    }
    std::vector<SymbolicFact> leaves;
    for (const auto& f : t.leaves) leaves.push_back(*f.sym);
    CHECK(metgen::count_proofs(leaves, *t.hypothesis.sym) == 1);
  }
  CHECK(hard > 100);
  CHECK(conjoinable > 0);
}

TEST_CASE("count_proofs on hand-built cases") {
  auto a = SymbolicFact::atom("p", {"a"});
  auto b = SymbolicFact::atom("q", {"a"});
  auto rule = SymbolicFact::implies(a, b);
  CHECK(metgen::count_proofs({a, rule}, b) == 1);
  CHECK(metgen::count_proofs({a}, b) == 0);
  auto isa = SymbolicFact::is_a("a", "c");
  auto qc = SymbolicFact::atom("q", {"c"});
  CHECK(metgen::count_proofs({a, rule, isa, qc}, b) == 2);
}

TEST_CASE("invalid generator configurations") {
  metgen::GeneratorConfig gc;
  gc.n_entities = 4;
  CHECK_THROWS_AS(metgen::generate_synthetic(gc), metgen::Error);
  gc = {};
  gc.n_entities = 5000;
  CHECK_THROWS_AS(metgen::generate_synthetic(gc), metgen::Error);
  gc = {};
  gc.min_depth = 3;
  gc.max_depth = 2;
  CHECK_THROWS_AS(metgen::generate_synthetic(gc), metgen::Error);
  gc = {};
  gc.hard_fraction = 1.5;
  try {
    metgen::generate_synthetic(gc);
    FAIL("expected ConfigError");
  } catch (const metgen::Error& e) {
    CHECK(e.kind() == metgen::ErrorKind::ConfigError);
  }
}
