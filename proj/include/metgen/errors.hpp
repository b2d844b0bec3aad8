#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metgen {

enum class ErrorKind {
  // input / data errors
  MalformedStep,
  UnknownId,
  CyclicProof,
  MultipleRoots,
  InvalidTree,
  ParseError,
  InvariantViolation,
  ConfigError,
  AmbiguousType,
  EmptyCandidateSet,
  NoCandidates,
  NoValidCandidate,
  DomainError,
  ModuleUnavailable,
  MissingPrediction,
  // backend errors
  TransportError,
  ProtocolError,
  BackendRefused,
  // bugs
  Internal,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit codes used by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitBackend = 3;
inline constexpr int kExitInternal = 4;

int exit_code_for(ErrorKind kind);

}  // namespace metgen
