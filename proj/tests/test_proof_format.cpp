#include <doctest.h>

#include "helpers.hpp"
#include "metgen/dataio.hpp"
#include "metgen/errors.hpp"
#include "metgen/proof_format.hpp"

using namespace testing;
using metgen::ErrorKind;
using metgen::ViolationKind;

namespace {

std::vector<Fact> volcano_facts() {
  return {text_fact("sent1", "the sun is a star"),
          text_fact("sent2", "eruptions produce ash clouds"),
          text_fact("sent3", "ash is a kind of material"),
          text_fact("sent4", "blocking sunlight cools the surface"),
          text_fact("sent5", "ash clouds block sunlight")};
}

Fact hyp() { return text_fact("hypothesis", "eruptions can cool the surface"); }

const char* kVolcano = "sent2 & sent5 -> int1: eruptions block sunlight; sent4 & int1 -> hypothesis;";

ErrorKind parse_error(const std::string& proof) {
  try {
    tree(proof, volcano_facts(), hyp());
  } catch (const metgen::Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

bool has(const std::vector<metgen::Violation>& v, ViolationKind k) {
  return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.kind == k; });
}

}  // namespace

TEST_CASE("parse the volcano proof") {
  auto t = tree(kVolcano, volcano_facts(), hyp());
  CHECK(t.leaves.size() == 3);
  CHECK(t.intermediates.size() == 1);
  CHECK(t.intermediates[0].text == "eruptions block sunlight");
  CHECK(t.steps.size() == 2);
  for (const auto& s : t.steps) {
    CHECK(s.rtype == metgen::ReasoningType::Unknown);
    CHECK(s.direction == metgen::Direction::Deductive);
  }
  CHECK(metgen::validate_tree(t, volcano_facts()).empty());
  CHECK(metgen::serialize_tree(t) == kVolcano);
}

TEST_CASE("parse errors") {
  CHECK(parse_error("sent1 -> hypothesis;") == ErrorKind::MalformedStep);
  CHECK(parse_error("sent1 & sent9 -> hypothesis;") == ErrorKind::UnknownId);
  ErrorKind k = parse_error("sent1 & sent2 -> int1: c; sent3 & int1 -> int2: d;");
  CHECK((k == ErrorKind::MultipleRoots || k == ErrorKind::MalformedStep));
  CHECK(parse_error("sent1 & int2 -> int1: a; sent2 & int1 -> int2: b; int2 & sent3 -> hypothesis;") ==
        ErrorKind::CyclicProof);
  CHECK(parse_error("sent1 sent2 -> hypothesis;") == ErrorKind::MalformedStep);
}

TEST_CASE("single step fixpoint") {
  auto t = tree("sent1 & sent2 -> hypothesis;", volcano_facts(), hyp());
  CHECK(metgen::serialize_tree(t) == "sent1 & sent2 -> hypothesis;");
}

TEST_CASE("validate role and availability rules") {
  auto t = tree(kVolcano, volcano_facts(), hyp());
  auto bad = t;
  bad.steps[0].output = "sent3";
  CHECK(has(metgen::validate_tree(bad, nullptr), ViolationKind::NonLeafMustBeIntermediate));

  std::vector<Fact> partial = volcano_facts();
  partial.erase(partial.begin() + 1);  // drop sent2
  CHECK(has(metgen::validate_tree(t, partial), ViolationKind::LeafNotAvailable));
}

TEST_CASE("swapping a step's input and output is rejected") {
  metgen::GeneratorConfig gc;
  gc.n_instances = 60;
  gc.min_depth = 2;
  gc.max_depth = 4;
  for (const auto& inst : metgen::generate_synthetic(gc)) {
    const auto& t = *inst.gold;
    for (size_t s = 0; s < t.steps.size(); ++s) {
      for (size_t i = 0; i < t.steps[s].inputs.size(); ++i) {
        if (t.steps[s].inputs[i].rfind("int", 0) != 0) continue;
        auto bad = t;
        std::swap(bad.steps[s].inputs[i], bad.steps[s].output);
        CHECK_FALSE(metgen::validate_tree(bad, nullptr).empty());
      }
    }
  }
}

TEST_CASE("parse inverts serialize on generated trees") {
  metgen::GeneratorConfig gc;
  gc.n_instances = 1000;
  gc.min_distractors = 0;
  gc.max_distractors = 0;
  for (const auto& inst : metgen::generate_synthetic(gc)) {
    const auto& t = *inst.gold;
    std::vector<Fact> sentences = inst.facts;
    auto back = tree(metgen::serialize_tree(t), sentences, inst.hypothesis);
    REQUIRE(back.leaves.size() == t.leaves.size());
    for (size_t i = 0; i < t.leaves.size(); ++i) CHECK(back.leaves[i].id == t.leaves[i].id);
    REQUIRE(back.intermediates.size() == t.intermediates.size());
    for (size_t i = 0; i < t.intermediates.size(); ++i) {
      CHECK(back.intermediates[i].id == t.intermediates[i].id);
      CHECK(back.intermediates[i].text == t.intermediates[i].text);
    }
    REQUIRE(back.steps.size() == t.steps.size());
    auto a = metgen::topological_steps(t);
    auto b = metgen::topological_steps(back);
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].inputs == b[i].inputs);
      CHECK(a[i].output == b[i].output);
    }
  }
}

TEST_CASE("binarize left-folds n-premise steps") {
  std::vector<Fact> facts = volcano_facts();
  auto t = tree("sent3 & sent1 & sent2 -> hypothesis;", facts, hyp());
  REQUIRE(t.steps.size() == 1);
  CHECK(t.steps[0].inputs.size() == 3);
  auto b = metgen::binarize(t);
  CHECK(b.steps.size() == 2);
  for (const auto& s : b.steps) CHECK(s.inputs.size() == 2);
  CHECK(metgen::validate_tree(b, facts).empty());
  CHECK(metgen::serialize_tree(b).rfind("sent1 & sent2 -> int1", 0) == 0);
}

TEST_CASE("canonicalize renumbers intermediates") {
  auto t = tree("sent2 & sent5 -> int7: x; sent4 & int7 -> hypothesis;", volcano_facts(), hyp());
  auto c = metgen::canonicalize(t);
  CHECK(metgen::serialize_tree(c) == "sent2 & sent5 -> int1: x; sent4 & int1 -> hypothesis;");
}
