#include "metgen/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "metgen/config.hpp"
#include "metgen/controller.hpp"
#include "metgen/dataio.hpp"
#include "metgen/decompose.hpp"
#include "metgen/errors.hpp"
#include "metgen/evaluation.hpp"
#include "metgen/judge.hpp"
#include "metgen/losses.hpp"
#include "metgen/modules.hpp"
#include "metgen/proof_format.hpp"
#include "metgen/search.hpp"

namespace metgen {

using json = nlohmann::json;

namespace {

struct KeySpec {
  std::string name;
  std::string fallback;
  std::string help;
  bool flag = false;
};

const std::vector<KeySpec> kSearchKeys = {
    {"task", "2", "task setting: 1, 2 or 3"},
    {"beam", "10", "beam size K"},
    {"depth", "5", "maximum reasoning depth D"},
    {"theta", "0.001", "distractor filter threshold"},
    {"tau", "0.1", "fraction of step candidates expanded per state"},
    {"lambda", "0.5", "weight of the mean fact score in the state score"},
    {"prove_threshold", "1.0", "similarity at which a state counts as proved"},
    {"mode", "controller", "controller | heuristic"},
    {"backend", "lexical", "symbolic | lexical | remote:<url>"},
    {"judge", "lexical", "lexical | symbolic"},
    {"timeout_ms", "10000", "remote request timeout"},
    {"retries", "2", "remote retries per request"},
    {"max_in_flight", "4", "concurrent remote requests"},
};

const std::vector<KeySpec> kRunKeys = {
    {"out", "", "output file (default stdout)"},
    {"manifest", "", "run manifest file (default <out>.manifest.json)"},
    {"seed", "1", "random seed"},
    {"jobs", "4", "worker threads"},
};

struct Subcommand {
  std::string name;
  std::string help;
  std::vector<KeySpec> keys;
};

std::vector<KeySpec> concat(std::initializer_list<std::vector<KeySpec>> parts) {
  std::vector<KeySpec> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::vector<Subcommand>& subcommands() {
  static const std::vector<Subcommand> subs = {
      {"generate",
       "search for an entailment tree per instance",
       concat({{{"data", "", "dataset JSONL"},
                {"retrieval", "", "retrieved sentences for task 3"},
                {"trace", "", "trace JSONL file"}},
               kSearchKeys,
               kRunKeys})},
      {"evaluate",
       "score predictions against gold trees",
       concat({{{"pred", "", "predictions JSONL"},
                {"gold", "", "dataset JSONL with gold proofs"},
                {"task", "2", "task setting: 1, 2 or 3"},
                {"judge", "lexical", "lexical | symbolic"},
                {"judge_threshold", "0.55", "intermediate match threshold"},
                {"align", "official", "official | strict"},
                {"legacy_allcorrect", "false", "intermediates AllCorrect from precision only", true}},
               kRunKeys})},
      {"decompose",
       "split gold trees into reasoning states",
       concat({{{"gold", "", "dataset JSONL with gold proofs"}, {"task", "2", "task setting: 1, 2 or 3"}}, kRunKeys})},
      {"synth",
       "generate a synthetic corpus",
       concat({{{"n", "100", "number of instances"},
                {"min_depth", "1", "minimum tree depth"},
                {"max_depth", "4", "maximum tree depth"},
                {"min_distractors", "15", "minimum distractors per instance"},
                {"max_distractors", "20", "maximum distractors per instance"},
                {"n_entities", "40", "entities per alphabet"},
                {"n_predicates", "20", "predicates per alphabet"},
                {"hard", "false", "use hard distractors", true},
                {"hard_fraction", "0.5", "share of hard distractors"}},
               kRunKeys})},
      {"rank",
       "rank one-step candidate pairs",
       concat({{{"candidates", "", "candidate pools JSONL"}}, kSearchKeys, kRunKeys})},
      {"losses",
       "ranking losses over scored batches",
       concat({{{"batch", "", "scored batch JSONL"},
                {"m_step", "0.1", "step margin"},
                {"m_fact", "0.1", "fact margin"},
                {"m_state", "0.1", "state margin"}},
               kRunKeys})},
  };
  return subs;
}

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

// Values resolved as flag > config file > default.
class Resolved {
 public:
  std::map<std::string, std::string> values;
  std::map<std::string, std::string> sources;

  const std::string& str(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw Error(ErrorKind::Internal, "unresolved key " + key);
    return it->second;
  }
  int integer(const std::string& key) const { return parse_int(key, str(key)); }
  double real(const std::string& key) const { return parse_double(key, str(key)); }
  bool boolean(const std::string& key) const { return parse_bool(key, str(key)); }
  std::string path(const std::string& key) const {
    const std::string& p = str(key);
    if (p.empty()) throw Error(ErrorKind::ConfigError, "--" + dashed(key) + " is required");
    return p;
  }
};

Task parse_task_value(const std::string& s) {
  if (s == "1" || s == "task1") return Task::Task1;
  if (s == "2" || s == "task2") return Task::Task2;
  if (s == "3" || s == "task3") return Task::Task3;
  throw Error(ErrorKind::ConfigError, "task must be 1, 2 or 3, got '" + s + "'");
}

Strategy parse_mode(const std::string& s) {
  if (s == "controller") return Strategy::Controller;
  if (s == "heuristic") return Strategy::Heuristic;
  throw Error(ErrorKind::ConfigError, "mode must be controller or heuristic, got '" + s + "'");
}

std::string hex(const unsigned char* data, unsigned int len) {
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int{data[i]};
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + path);
  f << content;
  if (!f) throw Error(ErrorKind::ConfigError, "write failed for " + path);
}

// Runs work(i) for i in [0, n) on up to `jobs` threads. `work` must not throw.
template <class F>
void run_pool(size_t n, int jobs, F&& work) {
  std::atomic<size_t> next{0};
  auto loop = [&] {
    for (size_t i = next++; i < n; i = next++) work(i);
  };
  size_t extra = std::min<size_t>(n, static_cast<size_t>(std::max(1, jobs))) - (n > 0 ? 1 : 0);
  std::vector<std::jthread> threads;
  for (size_t t = 0; t < extra; ++t) threads.emplace_back(loop);
  loop();
}

struct Outcome {
  std::string line;           // JSON record for the output file
  std::vector<std::string> trace;
  int exit_code = kExitOk;
};

json error_record(const std::string& id, ErrorKind kind, const std::string& message) {
  return json{{"id", id}, {"error", {{"kind", std::string(to_string(kind))}, {"message", message}}}};
}

template <class F>
Outcome guarded(const std::string& id, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return Outcome{error_record(id, e.kind(), e.what()).dump(), {}, exit_code_for(e.kind())};
  } catch (const std::exception& e) {
    return Outcome{error_record(id, ErrorKind::Internal, e.what()).dump(), {}, kExitInternal};
  }
}

struct Engine {
  std::unique_ptr<EntailmentModule> module;
  std::shared_ptr<const SimilarityJudge> judge;
  std::unique_ptr<ScorerBackend> backend;
};

Engine make_engine(const Resolved& r) {
  Engine e;
  const std::string& backend = r.str("backend");
  if (backend == "symbolic" || backend == "lexical") {
    e.module = std::make_unique<SymbolicModule>();
    e.judge = make_judge(backend);
  } else if (backend.starts_with("remote:")) {
    RemoteOptions opts;
    opts.timeout_ms = r.integer("timeout_ms");
    opts.retries = r.integer("retries");
    opts.max_in_flight = r.integer("max_in_flight");
    if (opts.timeout_ms <= 0 || opts.retries < 0 || opts.max_in_flight <= 0 || opts.max_in_flight > 1024) {
      throw Error(ErrorKind::ConfigError, "remote options out of range");
    }
    e.module = std::make_unique<RemoteModule>(backend.substr(7), opts);
    e.judge = make_judge(r.str("judge"));
  } else {
    throw Error(ErrorKind::ConfigError, "backend must be symbolic, lexical or remote:<url>, got '" + backend + "'");
  }
  e.backend = std::make_unique<LexicalBackend>(e.judge);
  return e;
}

SearchConfig search_config(const Resolved& r) {
  SearchConfig sc;
  sc.task = parse_task_value(r.str("task"));
  sc.beam_size = r.integer("beam");
  sc.max_depth = r.integer("depth");
  sc.theta = r.real("theta");
  sc.tau = r.real("tau");
  sc.prove_threshold = r.real("prove_threshold");
  sc.strategy = parse_mode(r.str("mode"));
  sc.controller.lambda = r.real("lambda");
  sc.controller.theta = sc.theta;
  validate_config(sc);
  return sc;
}

json trace_json(const std::string& id, const TraceRecord& rec) {
  json chosen = json::array();
  for (const auto& c : rec.chosen) chosen.push_back({{"parent", c.parent}, {"candidate", c.candidate}, {"score", c.score}});
  json beam = json::array();
  for (const auto& b : rec.beam) {
    beam.push_back({{"target", b.target}, {"history", b.history}, {"score", b.score}, {"proved", b.proved}});
  }
  return json{{"id", id}, {"iteration", rec.iteration}, {"chosen", chosen}, {"beam", beam}};
}

json score_json(const Score& s) {
  return json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"allcorrect", s.allcorrect}};
}

std::string join_lines(const std::vector<Outcome>& outcomes) {
  std::string s;
  for (const auto& o : outcomes) {
    s += o.line;
    s += '\n';
  }
  return s;
}

int worst(const std::vector<Outcome>& outcomes) {
  int code = kExitOk;
  for (const auto& o : outcomes) code = std::max(code, o.exit_code);
  return code;
}

struct RunContext {
  const Resolved& r;
  std::ostream& out;
  std::ostream& err;
  std::map<std::string, std::string> inputs;  // key -> path, digested into the manifest

  void emit(const std::string& content) {
    const std::string& path = r.str("out");
    if (path.empty()) {
      out << content;
    } else {
      write_file(path, content);
    }
  }
};

int cmd_generate(RunContext& ctx) {
  const Resolved& r = ctx.r;
  SearchConfig sc = search_config(r);
  Engine engine = make_engine(r);
  std::string data = r.path("data");
  ctx.inputs["data"] = data;
  RetrievalMap retrieval;
  const RetrievalMap* retrieval_ptr = nullptr;
  if (sc.task == Task::Task3) {
    ctx.inputs["retrieval"] = r.path("retrieval");
    retrieval = load_retrieval(r.path("retrieval"));
    retrieval_ptr = &retrieval;
  }
  auto instances = load_dataset(data, sc.task, retrieval_ptr);
  bool want_trace = !r.str("trace").empty();

  std::vector<Outcome> outcomes(instances.size());
  run_pool(instances.size(), r.integer("jobs"), [&](size_t i) {
    const ProblemInstance& inst = instances[i];
    outcomes[i] = guarded(inst.id, [&] {
      Outcome o;
      TraceSink sink;
      if (want_trace) sink = [&](const TraceRecord& rec) { o.trace.push_back(trace_json(inst.id, rec).dump()); };
      auto facts = task_facts(inst, sc.task);
      SearchResult res = sc.strategy == Strategy::Controller
                             ? reason(inst.hypothesis, facts, sc, *engine.module, *engine.backend, *engine.judge, sink)
                             : heuristic_reason(inst.hypothesis, facts, sc, *engine.module, *engine.judge, sink);
      json rec{{"id", inst.id},
               {"proof", res.best_tree ? serialize_tree(*res.best_tree) : std::string()},
               {"proved", res.proved}};
      if (!res.warnings.empty()) rec["warnings"] = res.warnings;
      o.line = rec.dump();
      return o;
    });
  });

  ctx.emit(join_lines(outcomes));
  if (want_trace) {
    std::string trace;
    for (const auto& o : outcomes) {
      for (const auto& t : o.trace) trace += t + '\n';
    }
    write_file(r.str("trace"), trace);
  }
  size_t failed = std::count_if(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return o.exit_code != 0; });
  if (failed > 0) ctx.err << failed << " of " << outcomes.size() << " instances failed\n";
  return worst(outcomes);
}

// Reads {id, proof} prediction records; error records count as missing.
std::map<std::string, std::string> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path);
  std::map<std::string, std::string> preds;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string()) {
      throw Error(ErrorKind::ParseError, path + ":" + std::to_string(lineno) + ": record without string id");
    }
    std::string id = rec["id"];
    if (preds.count(id)) throw Error(ErrorKind::ParseError, path + ":" + std::to_string(lineno) + ": duplicate id " + id);
    if (rec.contains("proof") && rec["proof"].is_string()) preds[id] = rec["proof"];
    else preds[id];  // present but unusable
  }
  return preds;
}

int cmd_evaluate(RunContext& ctx) {
  const Resolved& r = ctx.r;
  Task task = parse_task_value(r.str("task"));
  auto judge = make_judge(r.str("judge"));
  double threshold = r.real("judge_threshold");
  IntermediateOptions opts{parse_align_mode(r.str("align")), r.boolean("legacy_allcorrect")};
  ctx.inputs["gold"] = r.path("gold");
  ctx.inputs["pred"] = r.path("pred");
  auto gold = load_dataset(r.path("gold"), task);
  auto preds = load_predictions(r.path("pred"));
  std::set<std::string> gold_ids;
  for (const auto& g : gold) {
    if (!g.gold) throw Error(ErrorKind::ParseError, "instance " + g.id + " has no gold proof");
    gold_ids.insert(g.id);
  }
  for (const auto& [id, _] : preds) {
    if (!gold_ids.count(id)) throw Error(ErrorKind::UnknownId, "prediction for unknown instance " + id);
  }

  struct Row {
    json record;
    MetricReport report;
    bool scored = false;
  };
  std::vector<Row> rows(gold.size());
  run_pool(gold.size(), r.integer("jobs"), [&](size_t i) {
    const ProblemInstance& inst = gold[i];
    Row& row = rows[i];
    auto it = preds.find(inst.id);
    if (it == preds.end() || it->second.empty()) {
      row.record = error_record(inst.id, ErrorKind::MissingPrediction, "no usable prediction");
      return;
    }
    try {
      std::map<std::string, Fact> sentences;
      for (const auto& f : inst.facts) sentences[f.id] = f;
      for (const auto& f : inst.gold->leaves) sentences.emplace(f.id, f);
      EntailmentTree pred = parse_linearized_proof(it->second, sentences, inst.hypothesis);
      row.report = evaluate_tree(pred, *inst.gold, *judge, threshold, opts);
      row.scored = true;
      row.record = json{{"id", inst.id},
                        {"leaves", score_json(row.report.leaves)},
                        {"steps", score_json(row.report.steps)},
                        {"intermediates", score_json(row.report.intermediates)},
                        {"overall_allcorrect", row.report.overall_allcorrect}};
    } catch (const Error& e) {
      row.record = error_record(inst.id, e.kind(), e.what());
    } catch (const std::exception& e) {
      row.record = error_record(inst.id, ErrorKind::Internal, e.what());
    }
  });

  double n = static_cast<double>(gold.size());
  auto mean = [&](auto field) {
    if (gold.empty()) return 0.0;
    double s = 0.0;
    for (const auto& row : rows) {
      if (row.scored) s += field(row.report);
    }
    return s / n;
  };
  long missing = 0;
  long invalid = 0;
  for (const auto& row : rows) {
    if (row.scored) continue;
    if (row.record["error"]["kind"] == std::string(to_string(ErrorKind::MissingPrediction))) ++missing;
    else ++invalid;
  }
  auto metric = [&](auto get) {
    return json{{"f1", mean([&](const MetricReport& m) { return get(m).f1; })},
                {"allcorrect", mean([&](const MetricReport& m) { return static_cast<double>(get(m).allcorrect); })}};
  };
  json aggregate{
      {"n", gold.size()},
      {"missing_prediction", missing},
      {"invalid_prediction", invalid},
      {"align", std::string(to_string(opts.mode))},
      {"leaves", metric([](const MetricReport& m) -> const Score& { return m.leaves; })},
      {"steps", metric([](const MetricReport& m) -> const Score& { return m.steps; })},
      {"intermediates", metric([](const MetricReport& m) -> const Score& { return m.intermediates; })},
      {"overall_allcorrect", mean([](const MetricReport& m) { return static_cast<double>(m.overall_allcorrect); })},
  };
  std::string content;
  for (const auto& row : rows) content += row.record.dump() + '\n';
  content += json{{"aggregate", aggregate}}.dump() + '\n';
  ctx.emit(content);
  return kExitOk;
}

json fact_json(const Fact& f) { return json{{"id", f.id}, {"text", f.text}}; }

std::string step_text(const Step& s) {
  std::string t;
  for (size_t i = 0; i < s.inputs.size(); ++i) t += (i ? " & " : "") + s.inputs[i];
  return t + " -> " + s.output;
}

int cmd_decompose(RunContext& ctx) {
  const Resolved& r = ctx.r;
  Task task = parse_task_value(r.str("task"));
  ctx.inputs["gold"] = r.path("gold");
  auto instances = load_dataset(r.path("gold"), task);
  std::vector<Outcome> outcomes(instances.size());
  run_pool(instances.size(), r.integer("jobs"), [&](size_t i) {
    const ProblemInstance& inst = instances[i];
    outcomes[i] = guarded(inst.id, [&] {
      if (!inst.gold) throw Error(ErrorKind::ParseError, "instance " + inst.id + " has no gold proof");
      auto states = decompose_to_states(*inst.gold, distractors_of(inst));
      size_t n_forward = forward_state_count(*inst.gold);
      Outcome o;
      for (size_t k = 0; k < states.size(); ++k) {
        const ReasoningState& s = states[k];
        json facts = json::array();
        for (const auto& f : s.facts) facts.push_back(fact_json(f));
        json history = json::array();
        for (const auto& h : s.history) {
          history.push_back({{"direction", std::string(to_string(h.step.direction))},
                             {"rtype", std::string(to_string(h.step.rtype))},
                             {"step", step_text(h.step)},
                             {"generated", fact_json(h.generated)}});
        }
        json rec{{"id", inst.id},
                 {"index", k},
                 {"kind", k < n_forward ? "forward" : "abductive"},
                 {"target", fact_json(s.target)},
                 {"facts", facts},
                 {"history", history}};
        if (!o.line.empty()) o.line += '\n';
        o.line += rec.dump();
      }
      return o;
    });
  });
  std::string content;
  for (const auto& o : outcomes) {
    if (!o.line.empty()) content += o.line + '\n';
  }
  ctx.emit(content);
  return worst(outcomes);
}

int cmd_synth(RunContext& ctx) {
  const Resolved& r = ctx.r;
  GeneratorConfig gc;
  long long seed = std::stoll(r.str("seed"));
  if (seed < 0) throw Error(ErrorKind::ConfigError, "seed must be non-negative");
  gc.seed = static_cast<std::uint64_t>(seed);
  gc.n_instances = r.integer("n");
  gc.min_depth = r.integer("min_depth");
  gc.max_depth = r.integer("max_depth");
  gc.min_distractors = r.integer("min_distractors");
  gc.max_distractors = r.integer("max_distractors");
  gc.n_entities = r.integer("n_entities");
  gc.n_predicates = r.integer("n_predicates");
  gc.hard_distractors = r.boolean("hard");
  gc.hard_fraction = r.real("hard_fraction");
  GeneratorConfig empty = gc;
  empty.n_instances = 0;
  generate_synthetic(empty);  // validates the configuration up front
  size_t n = static_cast<size_t>(std::max(0, gc.n_instances));
  std::vector<Outcome> outcomes(n);
  run_pool(n, r.integer("jobs"), [&](size_t i) {
    outcomes[i] = guarded("synth-" + std::to_string(i), [&] {
      return Outcome{instance_to_json(generate_instance(gc, i)).dump(), {}, kExitOk};
    });
  });
  ctx.emit(join_lines(outcomes));
  return worst(outcomes);
}

int cmd_rank(RunContext& ctx) {
  const Resolved& r = ctx.r;
  SearchConfig sc = search_config(r);
  Engine engine = make_engine(r);
  ctx.inputs["candidates"] = r.path("candidates");
  std::vector<std::string> notices;
  auto pools = load_candidates(r.path("candidates"), &notices);
  for (const auto& n : notices) ctx.err << "notice: " << n << '\n';

  struct Row {
    Outcome outcome;
    std::optional<RankMetrics> metrics;
  };
  std::vector<Row> rows(pools.size());
  run_pool(pools.size(), r.integer("jobs"), [&](size_t i) {
    const CandidatePool& pool = pools[i];
    rows[i].outcome = guarded(pool.instance.id, [&] {
      std::vector<std::pair<std::string, std::string>> pairs;
      std::map<std::pair<std::string, std::string>, bool> valid;
      for (const auto& c : pool.candidates) {
        pairs.emplace_back(c.first, c.second);
        valid[{c.first, c.second}] = c.valid;
        valid[{c.second, c.first}] = c.valid;
      }
      auto ranked = rank_one_step_candidates(pool.instance.hypothesis, task_facts(pool.instance, sc.task), pairs, sc,
                                             *engine.backend);
      std::vector<bool> labels;
      json ranking = json::array();
      for (const auto& c : ranked) {
        bool v = valid[{c.first, c.second}];
        labels.push_back(v);
        ranking.push_back({{"first", c.first}, {"second", c.second}, {"score", c.score}, {"valid", v}});
      }
      RankMetrics m = rank_metrics(labels);
      rows[i].metrics = m;
      return Outcome{json{{"id", pool.instance.id}, {"ranking", ranking}, {"p_at_1", m.p_at_1}, {"ndcg", m.ndcg}}.dump(),
                     {},
                     kExitOk};
    });
  });
  double p1 = 0.0;
  double ndcg = 0.0;
  long scored = 0;
  std::string content;
  for (const auto& row : rows) {
    content += row.outcome.line + '\n';
    if (row.metrics) {
      p1 += row.metrics->p_at_1;
      ndcg += row.metrics->ndcg;
      ++scored;
    }
  }
  json aggregate{{"pools", pools.size()},
                 {"scored", scored},
                 {"p_at_1", scored ? p1 / scored : 0.0},
                 {"ndcg", scored ? ndcg / scored : 0.0}};
  content += json{{"aggregate", aggregate}}.dump() + '\n';
  ctx.emit(content);
  // Pools without a valid candidate are reported per record, not fatal.
  return kExitOk;
}

std::vector<double> numbers(const json& rec, const char* key) {
  std::vector<double> out;
  if (!rec.contains(key)) return out;
  if (!rec[key].is_array()) throw Error(ErrorKind::ParseError, std::string(key) + " must be an array");
  for (const auto& v : rec[key]) {
    if (!v.is_number()) throw Error(ErrorKind::ParseError, std::string(key) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::pair<double, double>> number_pairs(const json& rec, const char* key) {
  std::vector<std::pair<double, double>> out;
  if (!rec.contains(key)) return out;
  if (!rec[key].is_array()) throw Error(ErrorKind::ParseError, std::string(key) + " must be an array");
  for (const auto& v : rec[key]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw Error(ErrorKind::ParseError, std::string(key) + " must hold [number, number] pairs");
    }
    out.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  return out;
}

// Batch records:
//   {"id", "step_pairs": [[pos, neg]], "fact_pairs": [[shallow, deep]],
//    "distractor_scores": [d], "pos_states": [s], "neg_states": [s]}
int cmd_losses(RunContext& ctx) {
  const Resolved& r = ctx.r;
  double m_step = r.real("m_step");
  double m_fact = r.real("m_fact");
  double m_state = r.real("m_state");
  std::string path = r.path("batch");
  ctx.inputs["batch"] = path;
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path);
  std::vector<TreeLoss> losses;
  std::string content;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = path + ":" + std::to_string(lineno) + ": ";
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, where + e.what());
    }
    try {
      if (!rec.is_object()) throw Error(ErrorKind::ParseError, "record must be an object");
      TreeLoss t;
      t.step = step_rank_loss(number_pairs(rec, "step_pairs"), m_step);
      t.fact = fact_loss(number_pairs(rec, "fact_pairs"), numbers(rec, "distractor_scores"), m_fact);
      t.state = state_rank_loss(numbers(rec, "pos_states"), numbers(rec, "neg_states"), m_state);
      losses.push_back(t);
      json out{{"step", t.step}, {"fact", t.fact}, {"state", t.state}, {"total", t.step + t.fact + t.state}};
      if (rec.contains("id")) out["id"] = rec["id"];
      content += out.dump() + '\n';
    } catch (const Error& e) {
      throw Error(e.kind(), where + e.what());
    }
  }
  content += json{{"aggregate", {{"records", losses.size()}, {"total_loss", total_loss(losses)}}}}.dump() + '\n';
  ctx.emit(content);
  return kExitOk;
}

void write_manifest(const std::string& subcommand, const Resolved& r, const std::map<std::string, std::string>& inputs,
                    const std::optional<std::string>& config_path, double seconds, std::ostream& err) {
  json config = json::object();
  for (const auto& [k, v] : r.values) config[k] = {{"value", v}, {"source", r.sources.at(k)}};
  json digests = json::object();
  for (const auto& [k, p] : inputs) digests[k] = {{"path", p}, {"sha256", sha256_file(p)}};
  if (config_path) digests["config"] = {{"path", *config_path}, {"sha256", sha256_file(*config_path)}};
  json manifest{{"subcommand", subcommand},
                {"config", config},
                {"inputs", digests},
                {"tool_version", kToolVersion},
                {"seed", r.str("seed")},
                {"timing", {{"wall_seconds", seconds}}}};
  std::string path = r.str("manifest");
  if (path.empty() && !r.str("out").empty()) path = r.str("out") + ".manifest.json";
  if (path.empty()) {
    err << "manifest: " << manifest.dump() << '\n';
  } else {
    write_file(path, manifest.dump(2) + '\n');
  }
}

std::set<std::string> all_keys() {
  std::set<std::string> keys{"config"};
  for (const auto& sub : subcommands()) {
    for (const auto& k : sub.keys) keys.insert(k.name);
  }
  return keys;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::string data = read_file(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Internal, "sha256 failed");
  }
  return hex(md, len);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entailment tree generation and evaluation", "metgen"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  struct Bound {
    const Subcommand* spec = nullptr;
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::Option*> options;
    std::string config;
    CLI::Option* config_option = nullptr;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (const auto& sub : subcommands()) {
    auto b = std::make_unique<Bound>();
    b->spec = &sub;
    b->app = app.add_subcommand(sub.name, sub.help);
    for (const auto& k : sub.keys) {
      std::string name = "--" + dashed(k.name);
      std::string help = k.help + (k.fallback.empty() ? "" : " [" + k.fallback + "]");
      b->options[k.name] = k.flag ? b->app->add_flag(name, b->flags[k.name], help)
                                  : b->app->add_option(name, b->values[k.name], help);
    }
    b->config_option = b->app->add_option("--config", b->config, "key = value config file");
    bound.push_back(std::move(b));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  auto start = std::chrono::steady_clock::now();
  try {
    Bound* active = nullptr;
    for (auto& b : bound) {
      if (b->app->parsed()) active = b.get();
    }
    if (active == nullptr) throw Error(ErrorKind::ConfigError, "no subcommand");

    std::optional<ConfigFile> config;
    std::optional<std::string> config_path;
    if (active->config_option->count() > 0) {
      config_path = active->config;
      config = ConfigFile::load(active->config);
      auto known = all_keys();
      for (const auto& [k, _] : config->entries()) {
        if (!known.count(k)) throw Error(ErrorKind::ConfigError, "unknown config key '" + k + "'");
      }
    }

    Resolved r;
    for (const auto& k : active->spec->keys) {
      std::string value = k.fallback;
      std::string source = "default";
      if (active->options[k.name]->count() > 0) {
        value = k.flag ? "true" : active->values[k.name];
        source = "flag";
      } else if (config && config->get(k.name)) {
        value = *config->get(k.name);
        source = "config";
      }
      r.values[k.name] = value;
      r.sources[k.name] = source;
    }
    if (r.integer("jobs") < 1) throw Error(ErrorKind::ConfigError, "jobs must be at least 1");

    RunContext ctx{r, out, err, {}};
    const std::string& name = active->spec->name;
    int code = kExitOk;
    if (name == "generate") code = cmd_generate(ctx);
    else if (name == "evaluate") code = cmd_evaluate(ctx);
    else if (name == "decompose") code = cmd_decompose(ctx);
    else if (name == "synth") code = cmd_synth(ctx);
    else if (name == "rank") code = cmd_rank(ctx);
    else if (name == "losses") code = cmd_losses(ctx);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(name, r, ctx.inputs, config_path, seconds, err);
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace metgen
