#include "metgen/symbolic.hpp"

#include <algorithm>
#include <cctype>

#include "metgen/errors.hpp"

namespace metgen {

namespace {

bool valid_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

void require_name(std::string_view name) {
  if (!valid_name(name)) {
    throw Error(ErrorKind::ParseError, "invalid symbol name '" + std::string(name) + "'");
  }
}

class SexprReader {
 public:
  explicit SexprReader(std::string_view text) : text_(text) {}

  SymbolicFact read_fact() {
    expect('(');
    std::string head = read_name();
    SymbolicFact result = [&] {
      if (head == "atom") {
        std::string pred = read_name();
        std::vector<std::string> args;
        while (peek() != ')') args.push_back(read_name());
        return SymbolicFact::atom(pred, std::move(args));
      }
      if (head == "isa") {
        std::string sub = read_name();
        std::string sup = read_name();
        return SymbolicFact::is_a(sub, sup);
      }
      if (head == "implies" || head == "and") {
        SymbolicFact a = read_fact();
        SymbolicFact b = read_fact();
        return head == "and" ? SymbolicFact::conj(a, b) : SymbolicFact::implies(a, b);
      }
      throw Error(ErrorKind::ParseError, "unknown symbolic head '" + head + "'");
    }();
    expect(')');
    return result;
  }

  void finish() {
    skip_ws();
    if (pos_ != text_.size()) {
      throw Error(ErrorKind::ParseError, "trailing input in symbolic fact '" + std::string(text_) + "'");
    }
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    if (pos_ >= text_.size()) throw Error(ErrorKind::ParseError, "unexpected end of symbolic fact");
    return text_[pos_];
  }
  void expect(char c) {
    if (peek() != c) {
      throw Error(ErrorKind::ParseError,
                  std::string("expected '") + c + "' in symbolic fact '" + std::string(text_) + "'");
    }
    ++pos_;
  }
  std::string read_name() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    require_name(name);
    return name;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

void collect_entities(const SymbolicFact& f, std::vector<std::string>& out) {
  switch (f.kind()) {
    case SymbolicFact::Kind::Atom:
    case SymbolicFact::Kind::IsA:
      out.insert(out.end(), f.args().begin(), f.args().end());
      break;
    case SymbolicFact::Kind::Implies:
    case SymbolicFact::Kind::Conj:
      collect_entities(f.left(), out);
      collect_entities(f.right(), out);
      break;
  }
}

void collect_symbols(const SymbolicFact& f, std::vector<std::string>& out) {
  switch (f.kind()) {
    case SymbolicFact::Kind::Atom:
      out.push_back(f.predicate());
      out.insert(out.end(), f.args().begin(), f.args().end());
      break;
    case SymbolicFact::Kind::IsA:
      out.insert(out.end(), f.args().begin(), f.args().end());
      break;
    case SymbolicFact::Kind::Implies:
    case SymbolicFact::Kind::Conj:
      collect_symbols(f.left(), out);
      collect_symbols(f.right(), out);
      break;
  }
}

}  // namespace

SymbolicFact SymbolicFact::make(Node node) {
  switch (node.kind) {
    case Kind::Atom: {
      node.key = "(atom " + node.name;
      for (const auto& a : node.args) node.key += " " + a;
      node.key += ")";
      break;
    }
    case Kind::IsA:
      node.key = "(isa " + node.args[0] + " " + node.args[1] + ")";
      break;
    case Kind::Implies:
      node.key = "(implies " + node.children[0].key() + " " + node.children[1].key() + ")";
      break;
    case Kind::Conj:
      node.key = "(and " + node.children[0].key() + " " + node.children[1].key() + ")";
      break;
  }
  return SymbolicFact(std::make_shared<const Node>(std::move(node)));
}

SymbolicFact SymbolicFact::atom(std::string predicate, std::vector<std::string> args) {
  require_name(predicate);
  for (const auto& a : args) require_name(a);
  return make(Node{Kind::Atom, std::move(predicate), std::move(args), {}, {}});
}

SymbolicFact SymbolicFact::is_a(std::string sub, std::string super) {
  require_name(sub);
  require_name(super);
  return make(Node{Kind::IsA, {}, {std::move(sub), std::move(super)}, {}, {}});
}

SymbolicFact SymbolicFact::implies(SymbolicFact antecedent, SymbolicFact consequent) {
  return make(Node{Kind::Implies, {}, {}, {std::move(antecedent), std::move(consequent)}, {}});
}

SymbolicFact SymbolicFact::conj(SymbolicFact a, SymbolicFact b) {
  if (b.key() < a.key()) std::swap(a, b);
  return make(Node{Kind::Conj, {}, {}, {std::move(a), std::move(b)}, {}});
}

SymbolicFact SymbolicFact::parse(std::string_view text) {
  SexprReader reader(text);
  SymbolicFact fact = reader.read_fact();
  reader.finish();
  return fact;
}

std::string SymbolicFact::render() const {
  switch (kind()) {
    case Kind::Atom: {
      if (args().empty()) return predicate();
      std::string out = args()[0] + " " + predicate();
      for (size_t i = 1; i < args().size(); ++i) out += " " + args()[i];
      return out;
    }
    case Kind::IsA:
      return sub() + " is a kind of " + super();
    case Kind::Implies:
      return "if " + antecedent().render() + " then " + consequent().render();
    case Kind::Conj:
      return left().render() + " and " + right().render();
  }
  return {};
}

std::vector<std::string> SymbolicFact::entities() const {
  std::vector<std::string> out;
  collect_entities(*this, out);
  return out;
}

std::vector<std::string> SymbolicFact::symbols() const {
  std::vector<std::string> out;
  collect_symbols(*this, out);
  return out;
}

bool SymbolicFact::mentions_entity(std::string_view entity) const {
  switch (kind()) {
    case Kind::Atom:
    case Kind::IsA:
      return std::find(args().begin(), args().end(), entity) != args().end();
    case Kind::Implies:
    case Kind::Conj:
      return left().mentions_entity(entity) || right().mentions_entity(entity);
  }
  return false;
}

bool SymbolicFact::mentions_substitutable(std::string_view entity) const {
  switch (kind()) {
    case Kind::Atom:
      return std::find(args().begin(), args().end(), entity) != args().end();
    case Kind::IsA:
      return sub() == entity;
    case Kind::Implies:
    case Kind::Conj:
      return left().mentions_substitutable(entity) || right().mentions_substitutable(entity);
  }
  return false;
}

SymbolicFact SymbolicFact::substitute(std::string_view from, std::string_view to) const {
  switch (kind()) {
    case Kind::Atom: {
      std::vector<std::string> args_out(args().begin(), args().end());
      for (auto& a : args_out) {
        if (a == from) a = std::string(to);
      }
      return atom(predicate(), std::move(args_out));
    }
    case Kind::IsA:
      return sub() == from ? is_a(std::string(to), super()) : *this;
    case Kind::Implies:
      return implies(left().substitute(from, to), right().substitute(from, to));
    case Kind::Conj:
      return conj(left().substitute(from, to), right().substitute(from, to));
  }
  return *this;
}

std::vector<std::string> subject_of(const SymbolicFact& fact) {
  switch (fact.kind()) {
    case SymbolicFact::Kind::Atom:
      return {fact.args().begin(), fact.args().end()};
    case SymbolicFact::Kind::Conj: {
      auto l = subject_of(fact.left());
      return l == subject_of(fact.right()) ? l : std::vector<std::string>{};
    }
    case SymbolicFact::Kind::IsA:
    case SymbolicFact::Kind::Implies:
      return {};
  }
  return {};
}

}  // namespace metgen
