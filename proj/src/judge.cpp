#include "metgen/judge.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "metgen/errors.hpp"

namespace metgen {

namespace {

const std::set<std::string, std::less<>>& stopwords() {
  static const std::set<std::string, std::less<>> words = {
      "a",   "an",   "the", "is",  "are",  "was", "were", "be",   "of",   "to",   "in",  "on",
      "at",  "by",   "for", "and", "or",   "if",  "then", "kind", "type", "that", "this", "it",
      "its", "with", "as",  "can", "from", "has", "have", "will", "into", "than", "so",
  };
  return words;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '_' || c == '-') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> content_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : word_tokens(text)) {
    if (!stopwords().count(t)) out.push_back(std::move(t));
  }
  return out;
}

double LexicalJudge::similarity(const Fact& a, const Fact& b) const {
  if (word_tokens(a.text) == word_tokens(b.text)) return 1.0;
  auto ta = content_tokens(a.text);
  auto tb = content_tokens(b.text);
  double s = jaccard(std::set<std::string>(ta.begin(), ta.end()), std::set<std::string>(tb.begin(), tb.end()));
  return std::min(s, kNonIdenticalCap);
}

double SymbolicJudge::similarity(const Fact& a, const Fact& b) const {
  if (!a.sym || !b.sym) return LexicalJudge{}.similarity(a, b);
  if (*a.sym == *b.sym) return 1.0;
  std::map<std::string, int> ca;
  std::map<std::string, int> cb;
  for (const auto& s : a.sym->symbols()) ++ca[s];
  for (const auto& s : b.sym->symbols()) ++cb[s];
  int inter = 0;
  int uni = 0;
  for (const auto& [s, n] : ca) {
    auto it = cb.find(s);
    int m = it == cb.end() ? 0 : it->second;
    inter += std::min(n, m);
    uni += std::max(n, m);
  }
  for (const auto& [s, m] : cb) {
    if (!ca.count(s)) uni += m;
  }
  if (uni == 0) return 0.0;
  return std::min(static_cast<double>(inter) / uni, kNonIdenticalCap);
}

double ExactJudge::similarity(const Fact& a, const Fact& b) const {
  if (a.sym && b.sym) return *a.sym == *b.sym ? 1.0 : 0.0;
  return a.text == b.text ? 1.0 : 0.0;
}

std::shared_ptr<const SimilarityJudge> make_judge(std::string_view name) {
  if (name == "lexical") return std::make_shared<LexicalJudge>();
  if (name == "symbolic") return std::make_shared<SymbolicJudge>();
  if (name == "exact") return std::make_shared<ExactJudge>();
  throw Error(ErrorKind::ConfigError, "unknown judge '" + std::string(name) + "'");
}

}  // namespace metgen
