#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyrobin {

/// Failure categories. Each maps to a distinct CLI exit code (see exit_code()).
enum class ErrorKind {
  Config,
  UnboundedDomain,
  EmptyDomain,
  DegenerateInput,
  PointOutsideDomain,
  DimensionUnsupported,
  DimensionMismatch,
  InternalInconsistency,
  DegenerateTriangle,
  SingularSystem,
  EigensolverNoConvergence,
  InvalidAngle,
  PointOutsideSector,
  DegenerateSector,
  RadiusTooLarge,
  MeshTooCoarse,
  ThetaOutOfRange,
  IntegrationBlowup,
  TruncationTooSmall,
  RootNotBracketed,
  NonpositiveSolution,
  NonpositiveField,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Process exit code used by the CLI for an error of the given kind.
/// 0 and 10 are reserved for "no certificate" / "certificate found".
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace polyrobin
