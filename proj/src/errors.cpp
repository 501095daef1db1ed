#include "annulus/errors.hpp"

namespace annulus {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateArc: return "DegenerateArc";
    case ErrorKind::NotDisjoint: return "NotDisjoint";
    case ErrorKind::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorKind::DisksOverlap: return "DisksOverlap";
    case ErrorKind::InverseDiverged: return "InverseDiverged";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::BadAngle: return "BadAngle";
    case ErrorKind::NoCurveFound: return "NoCurveFound";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NotPseudoRotation: return "NotPseudoRotation";
    case ErrorKind::NoLoopsFound: return "NoLoopsFound";
    case ErrorKind::IntersectionCountWrong: return "IntersectionCountWrong";
    case ErrorKind::NotInjective: return "NotInjective";
    case ErrorKind::BadMesh: return "BadMesh";
    case ErrorKind::DisplacementTooLarge: return "DisplacementTooLarge";
    case ErrorKind::NotTriangular: return "NotTriangular";
    case ErrorKind::CoverMismatch: return "CoverMismatch";
    case ErrorKind::CTooSmall: return "CTooSmall";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace annulus
