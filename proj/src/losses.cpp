#include "metgen/losses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "metgen/errors.hpp"

namespace metgen {

double margin_phi(double x1, double x2, double m) { return std::max(0.0, x2 - x1 + m); }

double step_rank_loss(const std::vector<std::pair<double, double>>& pos_neg, double m_step) {
  if (pos_neg.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [p, n] : pos_neg) sum += margin_phi(p, n, m_step);
  return sum / static_cast<double>(pos_neg.size());
}

double fact_loss(const std::vector<std::pair<double, double>>& ordered_pos, const std::vector<double>& distractor_scores,
                 double m_fact) {
  double loss = step_rank_loss(ordered_pos, m_fact);
  if (distractor_scores.empty()) return loss;
  double sum = 0.0;
  for (double d : distractor_scores) {
    if (!(d >= 0.0 && d < 1.0)) {
      throw Error(ErrorKind::DomainError, "distractor score " + std::to_string(d) + " outside [0, 1)");
    }
    sum += -std::log1p(-d);
  }
  return loss + sum / static_cast<double>(distractor_scores.size());
}

double state_rank_loss(const std::vector<double>& pos, const std::vector<double>& neg, double m_state) {
  if (pos.empty() || neg.empty()) return 0.0;
  double sum = 0.0;
  for (double p : pos) {
    for (double n : neg) sum += margin_phi(p, n, m_state);
  }
  return sum / static_cast<double>(pos.size() * neg.size());
}

double total_loss(const std::vector<TreeLoss>& per_tree) {
  if (per_tree.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : per_tree) sum += t.step + t.fact + t.state;
  return sum / static_cast<double>(per_tree.size());
}

std::map<std::string, int> leaf_depths(const EntailmentTree& tree) {
  std::map<std::string, int> out;
  std::function<void(const std::string&, int)> walk = [&](const std::string& id, int depth) {
    const Step* s = tree.producer(id);
    if (s == nullptr) {
      auto it = out.find(id);
      if (it == out.end() || depth < it->second) out[id] = depth;
      return;
    }
    for (const auto& in : s->inputs) walk(in, depth + 1);
  };
  walk(tree.root_id, 0);
  return out;
}

std::vector<std::pair<std::string, std::string>> depth_ordered_pairs(const EntailmentTree& tree) {
  auto depths = leaf_depths(tree);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [a, da] : depths) {
    for (const auto& [b, db] : depths) {
      if (da < db) out.emplace_back(a, b);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return id_less(x.first, y.first);
    return id_less(x.second, y.second);
  });
  return out;
}

}  // namespace metgen
