#include "metgen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "metgen/errors.hpp"
#include "metgen/proof_format.hpp"

namespace metgen {

namespace {

Score from_counts(double precision, double recall) {
  Score s;
  s.precision = precision;
  s.recall = recall;
  s.f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  s.allcorrect = s.f1 == 1.0 ? 1 : 0;
  return s;
}

std::vector<std::string> non_leaf_order(const EntailmentTree& tree) {
  std::vector<std::string> out;
  for (const auto& s : topological_steps(tree)) out.push_back(s.output);
  return out;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end());
  std::set<std::string> sb(b.begin(), b.end());
  size_t inter = 0;
  for (const auto& x : sa) inter += sb.count(x);
  size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

std::string_view to_string(AlignMode m) { return m == AlignMode::Official ? "official" : "strict"; }

AlignMode parse_align_mode(std::string_view s) {
  if (s == "official") return AlignMode::Official;
  if (s == "strict") return AlignMode::Strict;
  throw Error(ErrorKind::ConfigError, "unknown alignment mode '" + std::string(s) + "'");
}

Alignment align_trees(const EntailmentTree& pred, const EntailmentTree& gold) {
  Alignment a;
  a.pred_order = non_leaf_order(pred);
  std::vector<std::string> gold_nodes = non_leaf_order(gold);
  std::vector<std::vector<std::string>> gold_leaves;
  for (const auto& g : gold_nodes) gold_leaves.push_back(gold.descendant_leaves(g));
  for (const auto& p : a.pred_order) {
    auto leaves = pred.descendant_leaves(p);
    double best = 0.0;
    std::string target(kDummyNode);
    for (size_t i = 0; i < gold_nodes.size(); ++i) {
      double j = jaccard(leaves, gold_leaves[i]);
      if (j > best) {
        best = j;
        target = gold_nodes[i];
      }
    }
    a.pred_to_gold[p] = target;
  }
  return a;
}

Score leaves_score(const EntailmentTree& pred, const EntailmentTree& gold) {
  std::set<std::string> p;
  std::set<std::string> g;
  for (const auto& f : pred.leaves) p.insert(f.id);
  for (const auto& f : gold.leaves) g.insert(f.id);
  if (p.empty() && g.empty()) return from_counts(1.0, 1.0);
  size_t tp = 0;
  for (const auto& x : p) tp += g.count(x);
  double precision = p.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(p.size());
  double recall = g.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(g.size());
  return from_counts(precision, recall);
}

Score steps_score(const EntailmentTree& pred, const EntailmentTree& gold, const Alignment& alignment, AlignMode mode) {
  if (pred.steps.empty() || gold.steps.empty()) return from_counts(0.0, 0.0);
  auto mapped = [&](const std::string& id) -> std::string {
    if (role_of(id) == FactRole::Leaf) return id;
    auto it = alignment.pred_to_gold.find(id);
    if (it == alignment.pred_to_gold.end() || it->second == kDummyNode) return "DUMMY:" + id;
    return it->second;
  };
  size_t correct = 0;
  std::set<std::string> matched_gold;
  for (const auto& s : pred.steps) {
    auto it = alignment.pred_to_gold.find(s.output);
    if (it == alignment.pred_to_gold.end() || it->second == kDummyNode) continue;
    const Step* g = gold.producer(it->second);
    if (g == nullptr) continue;
    std::set<std::string> pin;
    for (const auto& in : s.inputs) pin.insert(mapped(in));
    std::set<std::string> gin(g->inputs.begin(), g->inputs.end());
    if (pin != gin) continue;
    bool fresh = matched_gold.insert(g->output).second;
    if (mode == AlignMode::Official || fresh) ++correct;
  }
  double precision = static_cast<double>(correct) / static_cast<double>(pred.steps.size());
  double recall = static_cast<double>(matched_gold.size()) / static_cast<double>(gold.steps.size());
  return from_counts(precision, recall);
}

Score intermediates_score(const EntailmentTree& pred, const EntailmentTree& gold, const Alignment& alignment,
                          const SimilarityJudge& judge, double threshold, IntermediateOptions options) {
  std::vector<std::string> gold_nodes = non_leaf_order(gold);
  if (alignment.pred_order.empty() || gold_nodes.empty()) return from_counts(0.0, 0.0);
  size_t correct = 0;
  std::set<std::string> credited;
  for (const auto& p : alignment.pred_order) {
    auto it = alignment.pred_to_gold.find(p);
    if (it == alignment.pred_to_gold.end() || it->second == kDummyNode) continue;
    const Fact* pf = pred.find(p);
    const Fact* gf = gold.find(it->second);
    if (pf == nullptr || gf == nullptr) continue;
    if (!(judge.similarity(*pf, *gf) > threshold)) continue;
    bool fresh = credited.insert(it->second).second;
    if (options.mode == AlignMode::Official || fresh) ++correct;
  }
  double precision = static_cast<double>(correct) / static_cast<double>(alignment.pred_order.size());
  double recall = static_cast<double>(credited.size()) / static_cast<double>(gold_nodes.size());
  Score s = from_counts(precision, recall);
  if (options.legacy_allcorrect) s.allcorrect = precision == 1.0 ? 1 : 0;
  return s;
}

MetricReport evaluate_tree(const EntailmentTree& pred, const EntailmentTree& gold, const SimilarityJudge& judge,
                           double threshold, IntermediateOptions options) {
  MetricReport r;
  r.alignment = align_trees(pred, gold);
  r.leaves = leaves_score(pred, gold);
  r.steps = steps_score(pred, gold, r.alignment, options.mode);
  r.intermediates = intermediates_score(pred, gold, r.alignment, judge, threshold, options);
  r.overall_allcorrect = r.leaves.allcorrect && r.steps.allcorrect && r.intermediates.allcorrect ? 1 : 0;
  return r;
}

RankMetrics rank_metrics(const std::vector<bool>& labels) {
  size_t valid = static_cast<size_t>(std::count(labels.begin(), labels.end(), true));
  if (valid == 0) throw Error(ErrorKind::NoValidCandidate, "candidate pool has no valid candidate");
  double dcg = 0.0;
  double ideal = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    double discount = 1.0 / std::log2(static_cast<double>(i) + 2.0);
    if (labels[i]) dcg += discount;
    if (i < valid) ideal += discount;
  }
  return RankMetrics{labels.front() ? 1.0 : 0.0, dcg / ideal};
}

}  // namespace metgen
