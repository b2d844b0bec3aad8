#pragma once

#include <array>
#include <atomic>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "metgen/model.hpp"

namespace metgen {

// For Abductive requests inputs[0] is the observed conclusion and inputs[1]
// the known premise.
struct ModuleRequest {
  Direction direction = Direction::Deductive;
  ReasoningType rtype = ReasoningType::Unknown;
  std::array<Fact, 2> inputs;
  std::string output_id;  // freshly allocated by the caller
};

struct ModuleResponse {
  Fact output;
  double confidence = 1.0;
};

// A single-step entailment module. Returns nullopt when the step does not
// apply to the given inputs.
class EntailmentModule {
 public:
  virtual ~EntailmentModule() = default;
  virtual bool supports(Direction direction, ReasoningType rtype) const = 0;
  virtual std::optional<ModuleResponse> infer(const ModuleRequest& request) const = 0;
};

// Deterministic rule engine over SymbolicFact; inputs without a symbolic form
// never fire.
class SymbolicModule : public EntailmentModule {
 public:
  bool supports(Direction, ReasoningType rtype) const override { return rtype != ReasoningType::Unknown; }
  std::optional<ModuleResponse> infer(const ModuleRequest& request) const override;
};

// "deductive substitution:" etc.
std::string module_prefix(Direction direction, ReasoningType rtype);

struct RemoteOptions {
  int timeout_ms = 10000;
  int retries = 2;
  int max_in_flight = 4;
};

// JSON over HTTP POST <endpoint>/infer.
//   request  {id, direction, rtype, prefix, premises: [text, text]}
//   response {id, output, confidence}
// Throws Error{TransportError | ProtocolError | BackendRefused}. An empty
// output string means the backend declined the step.
class RemoteModule : public EntailmentModule {
 public:
  explicit RemoteModule(std::string endpoint, RemoteOptions options = {});
  ~RemoteModule() override;

  bool supports(Direction, ReasoningType rtype) const override { return rtype != ReasoningType::Unknown; }
  std::optional<ModuleResponse> infer(const ModuleRequest& request) const override;

 private:
  std::string scheme_host_port_;
  RemoteOptions options_;
  mutable std::atomic<long> next_id_{0};
  mutable std::counting_semaphore<1024> in_flight_;
};

ModuleResponse remote_infer(const ModuleRequest& request, const std::string& endpoint, const RemoteOptions& options = {});

}  // namespace metgen
