#pragma once

#include <stdexcept>
#include <string>

namespace bvr {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- bad input (CLI exit code 2) ----

// Input violates a documented precondition or schema rule.
struct ValidationError : Error { using Error::Error; };
// Scenario text is not well-formed (bad JSON, unknown keys, wrong types).
struct ParseError : Error { using Error::Error; };
// File could not be read or written.
struct IoError : Error { using Error::Error; };
// Two agents that must be distinct coincide.
struct CoincidentAgents : ValidationError { using ValidationError::ValidationError; };
// Speed ratio outside (0,1) where a slower evader is required.
struct InvalidSpeedRatio : ValidationError { using ValidationError::ValidationError; };

// ---- solver breakdown (CLI exit code 3) ----

struct SolverFailure : Error { using Error::Error; };
// Polynomial is constant (or all coefficients vanish).
struct DegenerateInput : SolverFailure { using SolverFailure::SolverFailure; };
// Iterative refinement failed to meet the residual threshold in budget.
struct NoConvergence : SolverFailure { using SolverFailure::SolverFailure; };
// Queried angle is not covered by the inner oval branch.
struct OutsideOval : SolverFailure { using SolverFailure::SolverFailure; };
// Oval does not exist: evader already within engagement range (x1 <= rho).
struct DegenerateOval : SolverFailure { using SolverFailure::SolverFailure; };
// Perpendicular bisector has no slope form; caller must use x = const.
struct VerticalBisector : SolverFailure { using SolverFailure::SolverFailure; };
// The two dominance ovals do not intersect on the bisector.
struct NoIntersection : SolverFailure { using SolverFailure::SolverFailure; };
// No sextic root passed the stationarity filter (minimum at an oval vertex).
struct NoStationaryPoint : SolverFailure { using SolverFailure::SolverFailure; };
// Evader path parallel to the missile pair's bisector (sin phi = 0).
struct PathParallelToBisector : SolverFailure { using SolverFailure::SolverFailure; };
// Requested evader heading lies outside the pair's feasible band.
struct InfeasibleHeading : SolverFailure { using SolverFailure::SolverFailure; };
// Stage chaining asked for on a run that ended the other way.
struct WrongTermination : SolverFailure { using SolverFailure::SolverFailure; };

// ---- empty feasible set (CLI exit code 4) ----

struct EmptyFeasibleSet : Error { using Error::Error; };
// Apollonius circle misses the pair bisector: no heading works for this pair.
struct NoFeasibleHeading : EmptyFeasibleSet { using EmptyFeasibleSet::EmptyFeasibleSet; };

}  // namespace bvr
