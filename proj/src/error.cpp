#include "polyrobin/error.hpp"

namespace polyrobin {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::UnboundedDomain: return "UnboundedDomain";
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorKind::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::EigensolverNoConvergence: return "EigensolverNoConvergence";
    case ErrorKind::InvalidAngle: return "InvalidAngle";
    case ErrorKind::PointOutsideSector: return "PointOutsideSector";
    case ErrorKind::DegenerateSector: return "DegenerateSector";
    case ErrorKind::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorKind::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorKind::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorKind::IntegrationBlowup: return "IntegrationBlowup";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::RootNotBracketed: return "RootNotBracketed";
    case ErrorKind::NonpositiveSolution: return "NonpositiveSolution";
    case ErrorKind::NonpositiveField: return "NonpositiveField";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Io: return 3;
    case ErrorKind::UnboundedDomain:
    case ErrorKind::EmptyDomain:
    case ErrorKind::DegenerateInput: return 20;
    case ErrorKind::PointOutsideDomain:
    case ErrorKind::PointOutsideSector: return 21;
    case ErrorKind::DimensionUnsupported:
    case ErrorKind::DimensionMismatch: return 22;
    case ErrorKind::InternalInconsistency: return 23;
    case ErrorKind::DegenerateTriangle:
    case ErrorKind::SingularSystem: return 30;
    case ErrorKind::EigensolverNoConvergence: return 31;
    case ErrorKind::InvalidAngle:
    case ErrorKind::DegenerateSector:
    case ErrorKind::RadiusTooLarge:
    case ErrorKind::MeshTooCoarse: return 40;
    case ErrorKind::ThetaOutOfRange:
    case ErrorKind::IntegrationBlowup:
    case ErrorKind::TruncationTooSmall: return 50;
    case ErrorKind::RootNotBracketed:
    case ErrorKind::NonpositiveSolution: return 51;
    case ErrorKind::NonpositiveField: return 60;
  }
  return 1;
}

}  // namespace polyrobin
