#pragma once

#include <stdexcept>
#include <string>

namespace stackcheck {

/// Base class for every typed error the library raises.  Verdicts ("this map
/// is not a weak equivalence") are values, never exceptions; exceptions are
/// reserved for inputs that leave the domain of an operation.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

private:
  std::string kind_;
};

/// Two arguments were expected to live in the same finite category.
struct AmbientMismatch : Error {
  explicit AmbientMismatch(const std::string& detail) : Error("AmbientMismatch", detail) {}
};

/// Two presheaf maps were expected to share a codomain.
struct CodomainMismatch : Error {
  explicit CodomainMismatch(const std::string& detail) : Error("CodomainMismatch", detail) {}
};

/// A required pullback cone does not exist in the ambient category.  Carries
/// the cospan so reports can name exactly which limit is missing.
struct MissingPullback : Error {
  MissingPullback(const std::string& f, const std::string& g)
      : Error("MissingPullback", "no pullback of (" + f + ", " + g + ")"), left(f), right(g) {}
  std::string left, right;
};

/// An enumeration grew past its configured cap.
struct SizeBound : Error {
  explicit SizeBound(const std::string& detail) : Error("SizeBound", detail) {}
};

/// A predicate handed to the local-sieve search was not closed under
/// precomposition; carries the offending composable pair.
struct PredicateNotSieveStable : Error {
  explicit PredicateNotSieveStable(const std::string& detail)
      : Error("PredicateNotSieveStable", detail) {}
};

/// A family member fails the isofibration requirement of the homotopy-cover
/// check.
struct NotIsofibration : Error {
  explicit NotIsofibration(const std::string& detail) : Error("NotIsofibration", detail) {}
};

/// Stackification did not converge within its iteration bound.  This is an
/// assertion failure (a bug or an input outside the supported class), not a
/// verdict.
struct IterationBoundExceeded : Error {
  explicit IterationBoundExceeded(const std::string& detail)
      : Error("IterationBoundExceeded", detail) {}
};

/// The structure maps induced while extracting a groupoid object failed the
/// internal groupoid axioms.  Indicates an upstream bug, never a verdict.
struct StructureDescentFailure : Error {
  explicit StructureDescentFailure(const std::string& detail)
      : Error("StructureDescentFailure", detail) {}
};

/// A theorem-level pipeline refused to run because a site hypothesis failed;
/// carries which hypothesis and the site-level counterexample text.
struct HypothesisFailure : Error {
  HypothesisFailure(std::string which, const std::string& detail)
      : Error("HypothesisFailure", which + " — " + detail), hypothesis(std::move(which)) {}
  std::string hypothesis;
};

/// Bundle-file problems.
struct ParseError : Error {
  ParseError(int line, const std::string& detail)
      : Error("ParseError", "line " + std::to_string(line) + ": " + detail), line(line) {}
  int line;
};

struct UnresolvedReference : Error {
  explicit UnresolvedReference(const std::string& name)
      : Error("UnresolvedReference", name) {}
};

struct AxiomViolationError : Error {
  explicit AxiomViolationError(const std::string& detail) : Error("AxiomViolation", detail) {}
};

struct UnknownCheck : Error {
  explicit UnknownCheck(const std::string& name) : Error("UnknownCheck", name) {}
};

}  // namespace stackcheck
