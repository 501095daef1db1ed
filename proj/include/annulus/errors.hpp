#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace annulus {

enum class ErrorKind {
  DegenerateArc,
  NotDisjoint,
  ParamOutOfRange,
  DisksOverlap,
  InverseDiverged,
  ParseError,
  BadAngle,
  NoCurveFound,
  HypothesisViolated,
  NotPseudoRotation,
  NoLoopsFound,
  IntersectionCountWrong,
  NotInjective,
  BadMesh,
  DisplacementTooLarge,
  NotTriangular,
  CoverMismatch,
  CTooSmall,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for every failure the library reports; callers
// dispatch on kind(). Verification outcomes that are not errors (a family
// that fails a betweenness clause, say) are returned in reports instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DisplacementTooLarge : public Error {
 public:
  DisplacementTooLarge(const std::string& what, int required_split)
      : Error(ErrorKind::DisplacementTooLarge, what), required_split_(required_split) {}

  // Number of equal sub-stages that brings every piece under the limit.
  int required_split() const noexcept { return required_split_; }

 private:
  int required_split_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace annulus
