#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "metgen/model.hpp"

namespace metgen {

// Sentence-pair similarity in [0, 1]. Implementations are stateless and safe
// for concurrent calls.
class SimilarityJudge {
 public:
  virtual ~SimilarityJudge() = default;
  virtual double similarity(const Fact& a, const Fact& b) const = 0;
  virtual std::string name() const = 0;
};

// Lowercased word tokens with punctuation stripped, order preserved.
std::vector<std::string> word_tokens(std::string_view text);

// word_tokens minus stopwords (including the rendering template words).
std::vector<std::string> content_tokens(std::string_view text);

// 1 when the word-token sequences match; otherwise content-token Jaccard,
// capped below 1.
class LexicalJudge : public SimilarityJudge {
 public:
  double similarity(const Fact& a, const Fact& b) const override;
  std::string name() const override { return "lexical"; }
};

// 1 when structurally equal, else Jaccard over symbol multisets (capped below
// 1). Falls back to the lexical judge when either side lacks a symbolic form.
class SymbolicJudge : public SimilarityJudge {
 public:
  double similarity(const Fact& a, const Fact& b) const override;
  std::string name() const override { return "symbolic"; }
};

// 1 on identical content (symbolic key or text), else 0.
class ExactJudge : public SimilarityJudge {
 public:
  double similarity(const Fact& a, const Fact& b) const override;
  std::string name() const override { return "exact"; }
};

// Largest similarity a non-identical pair may receive.
inline constexpr double kNonIdenticalCap = 0.999;

// Documented value for BLEURT-based judging; not applied to the judges here.
inline constexpr double kBleurtThreshold = 0.28;

// "lexical" | "symbolic" | "exact"; throws Error{ConfigError} otherwise.
std::shared_ptr<const SimilarityJudge> make_judge(std::string_view name);

}  // namespace metgen
