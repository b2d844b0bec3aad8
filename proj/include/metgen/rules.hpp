#pragma once

#include <optional>

#include "metgen/model.hpp"
#include "metgen/symbolic.hpp"

namespace metgen {

// Single-step deduction over symbolic facts. Premise order is immaterial.
//
//  Substitution  IsA(x, y) + F[y]       -> F[x]   every substitutable y replaced;
//                                                  F must not mention x
//  Conjunction   A + B                  -> Conj(A, B)   A != B, atoms or conjunctions
//                                                  over the same subject
//  IfThen        Implies(A, B) + A      -> B
//
// No rule returns a conclusion equal to one of its premises.
std::optional<SymbolicFact> deduce(ReasoningType rtype, const SymbolicFact& p1, const SymbolicFact& p2);

// The unique m with deduce(rtype, m, premise) == conclusion, or nullopt when
// no completion exists or several do.
std::optional<SymbolicFact> abduce(ReasoningType rtype, const SymbolicFact& conclusion, const SymbolicFact& premise);

// The reasoning type reproducing c from (p1, p2); throws
// Error{AmbiguousType} when more than one does.
std::optional<ReasoningType> classify_step(const SymbolicFact& p1, const SymbolicFact& p2, const SymbolicFact& c);

// Shares at least one predicate or entity symbol.
bool shares_symbol(const SymbolicFact& a, const SymbolicFact& b);

}  // namespace metgen
