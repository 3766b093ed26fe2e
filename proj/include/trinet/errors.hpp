#pragma once

// Error taxonomy.  Every failure mode that callers are expected to branch on
// gets its own type; all derive from Error so batch drivers can map them to
// process exit codes in one place.

#include <stdexcept>
#include <string>

namespace trinet {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- anisotropy ---
/// Norm evaluated/differentiated at (numerically) zero input.
struct DegenerateInput : Error { using Error::Error; };
/// Density fails the uniform convexity check (D^2(phi^2) not positive).
struct NotElliptic : Error { using Error::Error; };
/// mobility_weight called with a non-orthonormal (nu,tau) pair.
struct NonOrthogonalFrame : Error { using Error::Error; };

// --- geometry ---
/// Curve with too few nodes, repeated nodes, or vanishing tangent.
struct DegenerateCurve : Error { using Error::Error; };
/// Junction angles outside (0,pi) or non-positive force-balance weights.
struct DegenerateAngles : Error { using Error::Error; };

// --- reference_frame ---
/// Optimal junction collapses onto an endpoint (within the closeness gate).
struct DegenerateMinimizer : Error { using Error::Error; };
/// Damped Newton failed to reach tolerance within the iteration budget.
struct NewtonDivergence : Error { using Error::Error; };
/// Recovered parameter map fails strict monotonicity.
struct NonMonotoneReparametrization : Error { using Error::Error; };

// --- flow ---
/// Normal-velocity conversion matrix F_h lost invertibility (h too large).
struct SingularFh : Error { using Error::Error; };
/// Junction Newton (end values / junction position) failed to converge.
struct JunctionNewtonDivergence : Error { using Error::Error; };
/// A time step raised the energy beyond tolerance even after retries.
struct StepRejected : Error { using Error::Error; };
/// Step budget exhausted before reaching t_end or stationarity.
struct MaxStepsExceeded : Error { using Error::Error; };
/// A curve shrank below the collapse floor; run terminated without surgery.
struct CollapseDetected : Error { using Error::Error; };

// --- diagnostics ---
/// Not enough usable samples for a fit/report.
struct InsufficientData : Error { using Error::Error; };
/// Energy gap below the double-precision log floor; LSI fit undefined.
struct EnergyAtMinimum : Error { using Error::Error; };
/// Trajectory did not reach the stationarity floor.
struct NotConverged : Error { using Error::Error; };
/// Lopatinskii-Shapiro probe called with Re(lambda) <= 0.
struct InvalidLambda : Error { using Error::Error; };

// --- cli/config ---
/// Malformed or out-of-range experiment configuration.
struct ConfigError : Error { using Error::Error; };

}  // namespace trinet
