#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "metgen/model.hpp"

namespace metgen {

// max(0, x2 - x1 + m)
double margin_phi(double x1, double x2, double m);

// Mean phi over (positive, negative) step-score pairs; 0 for no pairs.
double step_rank_loss(const std::vector<std::pair<double, double>>& pos_neg, double m_step);

// Mean phi over (shallower, deeper) gold-fact score pairs plus the mean of
// -log(1 - d) over distractor scores. Throws Error{DomainError} for d >= 1 or
// d < 0.
double fact_loss(const std::vector<std::pair<double, double>>& ordered_pos, const std::vector<double>& distractor_scores,
                 double m_fact);

// Mean phi over every (positive, negative) state-score pair.
double state_rank_loss(const std::vector<double>& pos, const std::vector<double>& neg, double m_state);

struct TreeLoss {
  double step = 0.0;
  double fact = 0.0;
  double state = 0.0;
};

// Mean over trees of step + fact + state.
double total_loss(const std::vector<TreeLoss>& per_tree);

// Depth of every leaf below the root (root step inputs have depth 1).
std::map<std::string, int> leaf_depths(const EntailmentTree& tree);

// All ordered pairs (a, b) of gold leaves with depth(a) < depth(b), across
// branches.
std::vector<std::pair<std::string, std::string>> depth_ordered_pairs(const EntailmentTree& tree);

}  // namespace metgen
