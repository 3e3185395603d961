#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ssn {

enum class ErrorCode {
  // input / parse errors
  MalformedStanza,
  CycleDetected,
  DanglingReference,
  MalformedLine,
  MalformedMatrix,
  MalformedNetwork,
  EmptyCorpus,
  InvalidConfig,
  // lookup errors
  UnknownTerm,
  UnknownIC,
  NamespaceMismatch,
  IdMismatch,
  LabelMismatch,
  // computation errors
  NoInformativeAncestor,
  NoAnnotations,
  DegreeTooLow,
  TooFewProducts,
  TooSmall,
  EmptyGraph,
  SolverFailure,
};

std::string_view to_string(ErrorCode code);

// True for codes that describe bad user input rather than a failed computation.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace ssn
