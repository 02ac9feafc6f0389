#pragma once

#include <stdexcept>
#include <string>

namespace gks {

enum class ErrorKind {
  InvalidArgument,
  NoHopfPoint,
  NoConvergence,
  TrivialSolution,
  IntegrationFailure,
  Truncation,
  EigenFailure,
  InsufficientResolution,
  FitAmbiguity,
  DegenerateParametrization,
  TooFewNodes,
  TrackingFailure,
  InstabilityAbort,
  PlotSchema,
  Io,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit code or a per-node annotation.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::NoHopfPoint: return "no-hopf-point";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::TrivialSolution: return "trivial-solution";
    case ErrorKind::IntegrationFailure: return "integration-failure";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::EigenFailure: return "eigensolver-failure";
    case ErrorKind::InsufficientResolution: return "insufficient-resolution";
    case ErrorKind::FitAmbiguity: return "fit-ambiguity";
    case ErrorKind::DegenerateParametrization: return "degenerate-parametrization";
    case ErrorKind::TooFewNodes: return "too-few-nodes";
    case ErrorKind::TrackingFailure: return "tracking-failure";
    case ErrorKind::InstabilityAbort: return "instability-abort";
    case ErrorKind::PlotSchema: return "plot-schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace gks
