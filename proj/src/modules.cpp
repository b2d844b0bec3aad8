#include "metgen/modules.hpp"

#include "metgen/rules.hpp"

namespace metgen {

std::optional<ModuleResponse> SymbolicModule::infer(const ModuleRequest& request) const {
  const Fact& a = request.inputs[0];
  const Fact& b = request.inputs[1];
  if (!a.sym || !b.sym) return std::nullopt;
  std::optional<SymbolicFact> out = request.direction == Direction::Deductive
                                        ? deduce(request.rtype, *a.sym, *b.sym)
                                        : abduce(request.rtype, *a.sym, *b.sym);
  if (!out) return std::nullopt;
  return ModuleResponse{Fact{request.output_id, out->render(), *out}, 1.0};
}

std::string module_prefix(Direction direction, ReasoningType rtype) {
  return std::string(to_string(direction)) + " " + std::string(to_string(rtype)) + ":";
}

}  // namespace metgen
