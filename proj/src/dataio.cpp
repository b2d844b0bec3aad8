#include "metgen/dataio.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "metgen/errors.hpp"
#include "metgen/proof_format.hpp"

namespace metgen {

using nlohmann::json;

namespace {

void sort_facts(std::vector<Fact>& facts) {
  std::sort(facts.begin(), facts.end(), [](const Fact& a, const Fact& b) { return id_less(a.id, b.id); });
}

std::string id_field(const json& record) {
  for (const char* key : {"id", "question_id", "qid"}) {
    if (!record.contains(key)) continue;
    const json& v = record[key];
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw Error(ErrorKind::ParseError, std::string("field '") + key + "' must be a string");
  }
  throw Error(ErrorKind::ParseError, "record has no id, question_id or qid");
}

std::string string_field(const json& record, const char* key) {
  if (!record.contains(key) || !record[key].is_string()) {
    throw Error(ErrorKind::ParseError, std::string("record needs a string '") + key + "'");
  }
  return record[key].get<std::string>();
}

std::map<std::string, std::string> parse_context_string(const std::string& context) {
  static const std::regex marker(R"((sent\d+)\s*:\s*)");
  std::map<std::string, std::string> out;
  std::string pending_id;
  size_t pending_start = 0;
  auto trim_end = [](std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
  };
  for (auto it = std::sregex_iterator(context.begin(), context.end(), marker); it != std::sregex_iterator(); ++it) {
    if (!pending_id.empty()) {
      out[pending_id] = trim_end(context.substr(pending_start, it->position() - pending_start));
    }
    pending_id = (*it)[1].str();
    pending_start = it->position() + it->length();
  }
  if (!pending_id.empty()) out[pending_id] = trim_end(context.substr(pending_start));
  return out;
}

std::map<std::string, std::string> sentence_map(const json& v, const char* what) {
  std::map<std::string, std::string> out;
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!it.value().is_string()) throw Error(ErrorKind::ParseError, std::string(what) + "." + it.key() + " must be a string");
      out[it.key()] = it.value().get<std::string>();
    }
  } else if (v.is_array()) {
    long k = 1;
    for (const auto& s : v) {
      if (!s.is_string()) throw Error(ErrorKind::ParseError, std::string(what) + " entries must be strings");
      out[leaf_id(k++)] = s.get<std::string>();
    }
  } else if (v.is_string()) {
    out = parse_context_string(v.get<std::string>());
  } else {
    throw Error(ErrorKind::ParseError, std::string(what) + " has an unsupported type");
  }
  for (const auto& [id, text] : out) {
    if (role_of(id) != FactRole::Leaf) throw Error(ErrorKind::ParseError, "sentence id '" + id + "' is not sent<k>");
  }
  return out;
}

std::map<std::string, std::string> sentences_of(const json& record) {
  if (record.contains("sentences")) return sentence_map(record["sentences"], "sentences");
  if (record.contains("context")) return sentence_map(record["context"], "context");
  if (record.contains("meta") && record["meta"].is_object() && record["meta"].contains("triples")) {
    return sentence_map(record["meta"]["triples"], "meta.triples");
  }
  throw Error(ErrorKind::ParseError, "record has no sentences, context or meta.triples");
}

std::map<std::string, SymbolicFact> symbolic_of(const json& record) {
  std::map<std::string, SymbolicFact> out;
  if (!record.contains("symbolic")) return out;
  const json& v = record["symbolic"];
  if (!v.is_object()) throw Error(ErrorKind::ParseError, "'symbolic' must be an object");
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!it.value().is_string()) throw Error(ErrorKind::ParseError, "symbolic." + it.key() + " must be a string");
    out.emplace(it.key(), SymbolicFact::parse(it.value().get<std::string>()));
  }
  return out;
}

Task parse_task(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : std::to_string(v.get<int>());
  if (s == "1" || s == "task1") return Task::Task1;
  if (s == "2" || s == "task2") return Task::Task2;
  if (s == "3" || s == "task3") return Task::Task3;
  throw Error(ErrorKind::ParseError, "unknown task '" + s + "'");
}

template <typename F>
auto with_line(long line, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), "line " + std::to_string(line) + ": " + std::string(e.what()));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + e.what());
  }
}

void apply_retrieval(ProblemInstance& inst, const std::vector<std::string>& retrieved) {
  std::map<std::string, const Fact*> by_text;
  long next = 0;
  for (const auto& f : inst.facts) next = std::max(next, id_number(f.id));
  if (inst.gold) {
    for (const auto& f : inst.gold->leaves) {
      by_text.emplace(f.text, &f);
      next = std::max(next, id_number(f.id));
    }
  }
  std::map<std::string, const Fact*> context_text;
  for (const auto& f : inst.facts) context_text.emplace(f.text, &f);
  std::vector<Fact> facts;
  std::set<std::string> used;
  for (const auto& text : retrieved) {
    auto it = by_text.find(text);
    Fact f;
    if (it != by_text.end() && used.insert(it->second->id).second) {
      f = *it->second;
    } else {
      f.id = leaf_id(++next);
      f.text = text;
      auto c = context_text.find(text);
      if (c != context_text.end()) f.sym = c->second->sym;
    }
    facts.push_back(std::move(f));
  }
  sort_facts(facts);
  inst.facts = std::move(facts);
}

}  // namespace

std::vector<Fact> task_facts(const ProblemInstance& instance, Task task) {
  if (task == Task::Task1 && instance.gold) return instance.gold->leaves;
  return instance.facts;
}

std::vector<Fact> distractors_of(const ProblemInstance& instance) {
  if (!instance.gold) return instance.facts;
  std::set<std::string> gold_ids;
  for (const auto& f : instance.gold->leaves) gold_ids.insert(f.id);
  std::vector<Fact> out;
  for (const auto& f : instance.facts) {
    if (!gold_ids.count(f.id)) out.push_back(f);
  }
  return out;
}

ProblemInstance instance_from_json(const json& record) {
  if (!record.is_object()) throw Error(ErrorKind::ParseError, "record is not a JSON object");
  ProblemInstance inst;
  inst.id = id_field(record);
  auto sym = symbolic_of(record);
  auto attach = [&](Fact& f) {
    auto it = sym.find(f.id);
    if (it != sym.end()) f.sym = it->second;
  };
  inst.hypothesis = Fact{std::string(kHypothesisId), string_field(record, "hypothesis"), std::nullopt};
  attach(inst.hypothesis);
  std::map<std::string, Fact> sentences;
  for (const auto& [id, text] : sentences_of(record)) {
    Fact f{id, text, std::nullopt};
    attach(f);
    sentences.emplace(id, f);
    inst.facts.push_back(f);
  }
  sort_facts(inst.facts);
  if (record.contains("task")) inst.task = parse_task(record["task"]);
  if (record.contains("proof")) {
    if (!record["proof"].is_string()) throw Error(ErrorKind::ParseError, "'proof' must be a string");
    std::string proof = record["proof"].get<std::string>();
    if (!proof.empty()) {
      try {
        inst.gold = parse_linearized_proof(proof, sentences, inst.hypothesis);
      } catch (const Error& e) {
        throw Error(ErrorKind::InvariantViolation, "gold proof of " + inst.id + ": " + e.what());
      }
      for (auto& f : inst.gold->intermediates) attach(f);
    }
  }
  return inst;
}

json instance_to_json(const ProblemInstance& inst) {
  json out;
  out["id"] = inst.id;
  out["hypothesis"] = inst.hypothesis.text;
  std::string context;
  json symbolic = json::object();
  for (const auto& f : inst.facts) {
    if (!context.empty()) context += " ";
    context += f.id + ": " + f.text;
    if (f.sym) symbolic[f.id] = f.sym->key();
  }
  out["context"] = context;
  if (inst.hypothesis.sym) symbolic[std::string(kHypothesisId)] = inst.hypothesis.sym->key();
  if (inst.gold) {
    out["proof"] = serialize_tree(*inst.gold);
    for (const auto& f : inst.gold->intermediates) {
      if (f.sym) symbolic[f.id] = f.sym->key();
    }
  }
  if (!symbolic.empty()) out["symbolic"] = symbolic;
  out["task"] = std::string(to_string(inst.task));
  return out;
}

std::vector<ProblemInstance> parse_dataset(std::istream& in, Task task, const RetrievalMap* retrieval) {
  std::vector<ProblemInstance> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ProblemInstance inst = with_line(lineno, [&] { return instance_from_json(json::parse(line)); });
    inst.task = task;
    if (task == Task::Task3) {
      if (retrieval == nullptr) throw Error(ErrorKind::ConfigError, "Task3 needs a retrieval file");
      auto it = retrieval->find(inst.id);
      if (it == retrieval->end()) {
        throw Error(ErrorKind::InvariantViolation, "line " + std::to_string(lineno) + ": no retrieval for " + inst.id);
      }
      apply_retrieval(inst, it->second);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<ProblemInstance> load_dataset(const std::string& path, Task task, const RetrievalMap* retrieval) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  return parse_dataset(in, task, retrieval);
}

RetrievalMap load_retrieval(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  auto as_list = [](const json& v, const std::string& id) {
    if (!v.is_array()) throw Error(ErrorKind::ParseError, "retrieval for " + id + " must be an array");
    std::vector<std::string> out;
    for (const auto& s : v) {
      if (!s.is_string()) throw Error(ErrorKind::ParseError, "retrieval for " + id + " must hold strings");
      out.push_back(s.get<std::string>());
    }
    return out;
  };
  RetrievalMap out;
  json whole = json::parse(text, nullptr, false);
  if (!whole.is_discarded() && whole.is_object() && !whole.contains("sentences")) {
    for (auto it = whole.begin(); it != whole.end(); ++it) out[it.key()] = as_list(it.value(), it.key());
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  long lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    with_line(lineno, [&] {
      json rec = json::parse(line);
      std::string id = id_field(rec);
      if (!rec.contains("sentences")) throw Error(ErrorKind::ParseError, "retrieval record needs 'sentences'");
      out[id] = as_list(rec["sentences"], id);
      return 0;
    });
  }
  return out;
}

std::vector<CandidatePool> parse_candidates(std::istream& in, std::vector<std::string>* notices) {
  std::vector<CandidatePool> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    CandidatePool pool = with_line(lineno, [&] {
      json rec = json::parse(line);
      if (!rec.is_object()) throw Error(ErrorKind::ParseError, "record is not a JSON object");
      CandidatePool p;
      p.instance.id = id_field(rec);
      p.instance.hypothesis = Fact{std::string(kHypothesisId), string_field(rec, "hypothesis"), std::nullopt};
      if (!rec.contains("facts")) throw Error(ErrorKind::ParseError, "record needs 'facts'");
      auto sym = symbolic_of(rec);
      for (const auto& [id, text] : sentence_map(rec["facts"], "facts")) {
        Fact f{id, text, std::nullopt};
        if (auto it = sym.find(id); it != sym.end()) f.sym = it->second;
        p.instance.facts.push_back(std::move(f));
      }
      if (auto it = sym.find(std::string(kHypothesisId)); it != sym.end()) p.instance.hypothesis.sym = it->second;
      sort_facts(p.instance.facts);
      if (!rec.contains("candidates") || !rec["candidates"].is_array()) {
        throw Error(ErrorKind::ParseError, "record needs a 'candidates' array");
      }
      if (rec["candidates"].empty()) throw Error(ErrorKind::ParseError, "empty candidate list for " + p.instance.id);
      for (const auto& c : rec["candidates"]) {
        if (!c.contains("premises") || !c["premises"].is_array() || c["premises"].size() != 2) {
          throw Error(ErrorKind::ParseError, "candidate needs two premises");
        }
        LabeledCandidate lc{c["premises"][0].get<std::string>(), c["premises"][1].get<std::string>(), false};
        for (const auto& id : {lc.first, lc.second}) {
          if (!std::any_of(p.instance.facts.begin(), p.instance.facts.end(), [&](const Fact& f) { return f.id == id; })) {
            throw Error(ErrorKind::ParseError, "candidate premise " + id + " is not a fact");
          }
        }
        if (!c.contains("label")) throw Error(ErrorKind::ParseError, "candidate needs a label");
        lc.valid = c["label"].is_boolean() ? c["label"].get<bool>() : c["label"].get<int>() != 0;
        p.candidates.push_back(std::move(lc));
      }
      return p;
    });
    bool any_valid = std::any_of(pool.candidates.begin(), pool.candidates.end(), [](const auto& c) { return c.valid; });
    if (!any_valid) {
      if (notices) notices->push_back("question " + pool.instance.id + " has no valid candidate; skipped");
      continue;
    }
    out.push_back(std::move(pool));
  }
  return out;
}

std::vector<CandidatePool> load_candidates(const std::string& path, std::vector<std::string>* notices) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  return parse_candidates(in, notices);
}

json pool_to_json(const CandidatePool& pool) {
  json out;
  out["question_id"] = pool.instance.id;
  out["hypothesis"] = pool.instance.hypothesis.text;
  json facts = json::object();
  json symbolic = json::object();
  for (const auto& f : pool.instance.facts) {
    facts[f.id] = f.text;
    if (f.sym) symbolic[f.id] = f.sym->key();
  }
  if (pool.instance.hypothesis.sym) symbolic[std::string(kHypothesisId)] = pool.instance.hypothesis.sym->key();
  out["facts"] = facts;
  if (!symbolic.empty()) out["symbolic"] = symbolic;
  json cands = json::array();
  for (const auto& c : pool.candidates) cands.push_back({{"premises", {c.first, c.second}}, {"label", c.valid ? 1 : 0}});
  out["candidates"] = cands;
  return out;
}

}  // namespace metgen
