#include "ssn/error.hpp"

namespace ssn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedStanza: return "MalformedStanza";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::MalformedMatrix: return "MalformedMatrix";
    case ErrorCode::MalformedNetwork: return "MalformedNetwork";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownTerm: return "UnknownTerm";
    case ErrorCode::UnknownIC: return "UnknownIC";
    case ErrorCode::NamespaceMismatch: return "NamespaceMismatch";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::NoInformativeAncestor: return "NoInformativeAncestor";
    case ErrorCode::NoAnnotations: return "NoAnnotations";
    case ErrorCode::DegreeTooLow: return "DegreeTooLow";
    case ErrorCode::TooFewProducts: return "TooFewProducts";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::SolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedStanza:
    case ErrorCode::CycleDetected:
    case ErrorCode::DanglingReference:
    case ErrorCode::MalformedLine:
    case ErrorCode::MalformedMatrix:
    case ErrorCode::MalformedNetwork:
    case ErrorCode::EmptyCorpus:
    case ErrorCode::InvalidConfig:
    case ErrorCode::UnknownTerm:
    case ErrorCode::NamespaceMismatch:
    case ErrorCode::IdMismatch:
    case ErrorCode::LabelMismatch:
      return true;
    default:
      return false;
  }
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::optional<std::size_t> line) {
  std::string out(to_string(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

}  // namespace ssn
