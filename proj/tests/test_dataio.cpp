#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "metgen/dataio.hpp"
#include "metgen/errors.hpp"
#include "metgen/proof_format.hpp"

using namespace testing;
using metgen::Task;

namespace {

const char* kRecord =
    R"({"id": "q7", "hypothesis": "the moon reflects light", )"
    R"("context": "sent1: the moon is a satellite sent2: satellites reflect light sent3: the sun is a star", )"
    R"("proof": "sent1 & sent2 -> hypothesis;"})";

}  // namespace

TEST_CASE("context string record") {
  std::istringstream in(kRecord);
  auto ds = metgen::parse_dataset(in, Task::Task2);
  REQUIRE(ds.size() == 1);
  const auto& inst = ds[0];
  CHECK(inst.id == "q7");
  REQUIRE(inst.facts.size() == 3);
  CHECK(inst.facts[0].text == "the moon is a satellite");
  CHECK(inst.facts[2].text == "the sun is a star");
  REQUIRE(inst.gold);
  CHECK(metgen::serialize_tree(*inst.gold) == "sent1 & sent2 -> hypothesis;");
  CHECK(metgen::task_facts(inst, Task::Task1).size() == 2);
  CHECK(metgen::task_facts(inst, Task::Task2).size() == 3);
  auto d = metgen::distractors_of(inst);
  REQUIRE(d.size() == 1);
  CHECK(d[0].id == "sent3");
}

TEST_CASE("id aliases and sentence layouts") {
  std::istringstream in(
      R"({"question_id": "a", "hypothesis": "h", "sentences": ["x y", "y z"]})" "\n"
      "\n"
      R"({"qid": "b", "hypothesis": "h", "meta": {"triples": {"sent2": "p", "sent10": "q"}}})" "\n");
  auto ds = metgen::parse_dataset(in, Task::Task2);
  REQUIRE(ds.size() == 2);
  CHECK(ds[0].id == "a");
  CHECK(ds[0].facts[1].id == "sent2");
  CHECK(ds[1].id == "b");
  CHECK(ds[1].facts[0].id == "sent2");
  CHECK(ds[1].facts[1].id == "sent10");
  CHECK_FALSE(ds[0].gold);
}

TEST_CASE("parse errors name the line") {
  std::istringstream in(std::string(kRecord) + "\n" + R"({"id": "q8", "hypothesis": "h", "cont)");
  try {
    metgen::parse_dataset(in, Task::Task2);
    FAIL("expected a parse error");
  } catch (const metgen::Error& e) {
    CHECK(e.kind() == metgen::ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream bad_id(R"({"id": "q", "hypothesis": "h", "context": {"int1": "x"}})");
  CHECK_THROWS_AS(metgen::parse_dataset(bad_id, Task::Task2), metgen::Error);
  std::istringstream no_id(R"({"hypothesis": "h", "context": "sent1: x"})");
  CHECK_THROWS_AS(metgen::parse_dataset(no_id, Task::Task2), metgen::Error);
}

TEST_CASE("proof referencing a missing sentence is rejected") {
  std::istringstream in(R"({"id": "q", "hypothesis": "h", "context": "sent1: a", "proof": "sent1 & sent4 -> hypothesis;"})");
  CHECK_THROWS_AS(metgen::parse_dataset(in, Task::Task2), metgen::Error);
}

TEST_CASE("task3 retrieval replaces the context") {
  metgen::RetrievalMap r{{"q7", {"satellites reflect light", "water is wet"}}};
  std::istringstream in(kRecord);
  auto ds = metgen::parse_dataset(in, Task::Task3, &r);
  REQUIRE(ds.size() == 1);
  bool kept = false;
  bool added = false;
  for (const auto& f : ds[0].facts) {
    if (f.id == "sent2" && f.text == "satellites reflect light") kept = true;
    if (f.text == "water is wet") added = true;
    CHECK(f.text != "the sun is a star");
  }
  CHECK(kept);
  CHECK(added);

  TempDir dir;
  auto path = dir.write("r.jsonl", R"({"id": "q7", "sentences": ["a", "b"]})" "\n");
  auto loaded = metgen::load_retrieval(path);
  CHECK(loaded.at("q7") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("candidate pools") {
  std::istringstream in(
      R"({"question_id": "p1", "hypothesis": "h", "facts": ["a", "b", "c"], "candidates": [)"
      R"({"premises": ["sent1", "sent2"], "label": 1}, {"premises": ["sent1", "sent3"], "label": 0}]})" "\n"
      R"({"question_id": "p2", "hypothesis": "h", "facts": ["a", "b"], "candidates": [)"
      R"({"premises": ["sent1", "sent2"], "label": 0}]})" "\n");
  std::vector<std::string> notices;
  auto pools = metgen::parse_candidates(in, &notices);
  REQUIRE(pools.size() == 1);
  CHECK(pools[0].candidates.size() == 2);
  CHECK(pools[0].candidates[0].valid);
  CHECK_FALSE(pools[0].candidates[1].valid);
  REQUIRE(notices.size() == 1);
  CHECK(notices[0].find("p2") != std::string::npos);

  std::istringstream empty(R"({"question_id": "p3", "hypothesis": "h", "facts": ["a"], "candidates": []})");
  CHECK_THROWS_AS(metgen::parse_candidates(empty), metgen::Error);
  std::istringstream stray(
      R"({"question_id": "p4", "hypothesis": "h", "facts": ["a"], "candidates": [{"premises": ["sent1", "sent9"], "label": 1}]})");
  CHECK_THROWS_AS(metgen::parse_candidates(stray), metgen::Error);

  auto back = metgen::pool_to_json(pools[0]);
  std::istringstream again(back.dump());
  auto re = metgen::parse_candidates(again);
  REQUIRE(re.size() == 1);
  CHECK(re[0].candidates.size() == 2);
}

TEST_CASE("generated instances round-trip through JSON") {
  metgen::GeneratorConfig gc;
  gc.n_instances = 50;
  gc.hard_distractors = true;
  for (const auto& inst : metgen::generate_synthetic(gc)) {
    auto j = metgen::instance_to_json(inst);
    std::istringstream in(j.dump());
    auto back = metgen::parse_dataset(in, Task::Task2);
    REQUIRE(back.size() == 1);
    CHECK(back[0].id == inst.id);
    CHECK(metgen::instance_to_json(back[0]) == j);
    REQUIRE(back[0].facts.size() == inst.facts.size());
    for (size_t i = 0; i < inst.facts.size(); ++i) {
      REQUIRE(back[0].facts[i].sym);
      CHECK(back[0].facts[i].sym->key() == inst.facts[i].sym->key());
    }
  }
}

TEST_CASE("missing file is a parse error") {
  CHECK_THROWS_AS(metgen::load_dataset("/nonexistent/x.jsonl", Task::Task2), metgen::Error);
}
