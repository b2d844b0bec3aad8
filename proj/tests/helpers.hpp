#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "metgen/model.hpp"
#include "metgen/proof_format.hpp"
#include "metgen/symbolic.hpp"

namespace testing {

using metgen::EntailmentTree;
using metgen::Fact;
using metgen::SymbolicFact;

inline SymbolicFact A(const std::string& p, std::vector<std::string> args) {
  return SymbolicFact::atom(p, std::move(args));
}
inline SymbolicFact IsA(const std::string& x, const std::string& y) { return SymbolicFact::is_a(x, y); }
inline SymbolicFact Imp(const SymbolicFact& a, const SymbolicFact& b) { return SymbolicFact::implies(a, b); }
inline SymbolicFact Conj(const SymbolicFact& a, const SymbolicFact& b) { return SymbolicFact::conj(a, b); }

inline Fact sym_fact(const std::string& id, const SymbolicFact& s) { return Fact{id, s.render(), s}; }
inline Fact text_fact(const std::string& id, const std::string& text) { return Fact{id, text, std::nullopt}; }

inline std::map<std::string, Fact> by_id(const std::vector<Fact>& facts) {
  std::map<std::string, Fact> m;
  for (const auto& f : facts) m[f.id] = f;
  return m;
}

inline EntailmentTree tree(const std::string& proof, const std::vector<Fact>& sentences, const Fact& hypothesis) {
  return metgen::parse_linearized_proof(proof, by_id(sentences), hypothesis);
}

// Small closed universe over entities e0..e2 and predicates p0..p2.
inline std::vector<SymbolicFact> small_universe() {
  std::vector<std::string> ents{"e0", "e1", "e2"};
  std::vector<std::string> preds{"p0", "p1", "p2"};
  std::vector<SymbolicFact> unary;
  for (const auto& p : preds) {
    for (const auto& e : ents) unary.push_back(A(p, {e}));
  }
  std::vector<SymbolicFact> out = unary;
  for (const auto& p : preds) {
    for (const auto& x : ents) {
      for (const auto& y : ents) out.push_back(A(p, {x, y}));
    }
  }
  for (const auto& x : ents) {
    for (const auto& y : ents) {
      if (x != y) out.push_back(IsA(x, y));
    }
  }
  for (const auto& a : unary) {
    for (const auto& b : unary) {
      if (!(a == b)) out.push_back(Imp(a, b));
    }
  }
  for (size_t i = 0; i < unary.size(); ++i) {
    for (size_t j = i + 1; j < unary.size(); ++j) {
      if (unary[i].args()[0] == unary[j].args()[0]) out.push_back(Conj(unary[i], unary[j]));
    }
  }
  return out;
}

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("metgen-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(file(name), std::ios::binary) << content;
    return file(name);
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing
