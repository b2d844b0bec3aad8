#pragma once

#include <map>
#include <string>
#include <vector>

#include "metgen/judge.hpp"
#include "metgen/model.hpp"

namespace metgen {

inline constexpr std::string_view kDummyNode = "DUMMY";

// Official: several pred nodes may be credited against one gold node.
// Strict: each gold node (and gold step) is credited at most once.
enum class AlignMode { Official, Strict };

std::string_view to_string(AlignMode m);
AlignMode parse_align_mode(std::string_view s);

struct Alignment {
  std::map<std::string, std::string> pred_to_gold;  // pred non-leaf id -> gold non-leaf id or DUMMY
  std::vector<std::string> pred_order;              // pred non-leaves in evaluation order
};

// Each pred non-leaf (pred topological order) goes to the first gold non-leaf,
// in gold topological order, with the largest Jaccard over descendant leaf ids;
// DUMMY when that largest value is zero.
Alignment align_trees(const EntailmentTree& pred, const EntailmentTree& gold);

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int allcorrect = 0;
};

Score leaves_score(const EntailmentTree& pred, const EntailmentTree& gold);
Score steps_score(const EntailmentTree& pred, const EntailmentTree& gold, const Alignment& alignment,
                  AlignMode mode = AlignMode::Official);

struct IntermediateOptions {
  AlignMode mode = AlignMode::Official;
  // AllCorrect from precision == 1 instead of F1 == 1, as the unrepaired
  // official script computed it.
  bool legacy_allcorrect = false;
};

Score intermediates_score(const EntailmentTree& pred, const EntailmentTree& gold, const Alignment& alignment,
                          const SimilarityJudge& judge, double threshold, IntermediateOptions options = {});

struct MetricReport {
  Score leaves;
  Score steps;
  Score intermediates;
  int overall_allcorrect = 0;
  Alignment alignment;
};

MetricReport evaluate_tree(const EntailmentTree& pred, const EntailmentTree& gold, const SimilarityJudge& judge,
                           double threshold, IntermediateOptions options = {});

struct RankMetrics {
  double p_at_1 = 0.0;
  double ndcg = 0.0;
};

// labels[i] is the validity of the candidate ranked i-th (0-based).
// Binary gains, log2(rank + 1) discount. Throws Error{NoValidCandidate}.
RankMetrics rank_metrics(const std::vector<bool>& labels);

}  // namespace metgen
