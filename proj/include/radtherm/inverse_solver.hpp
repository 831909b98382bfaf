#pragma once

#include <span>
#include <string>
#include <vector>

#include "radtherm/measurement_models.hpp"

namespace radtherm {

/// Bisection policy. Defaults bracket 700-1300 degC.
struct SolverConfig {
  double bracket_lo = 973.15;  // K
  double bracket_hi = 1573.15;  // K
  double tolerance = 1e-3;      // K, final bracket width
  int max_iterations = 100;

  void validate() const;
  /// ceil(log2((hi - lo) / tolerance)): bisection steps needed to reach tolerance.
  int required_iterations() const;
};

enum class InversionStatus { converged, out_of_bracket, not_converged, invalid_input };

std::string_view to_string(InversionStatus status);

struct InversionResult {
  double tube_temp = 0.0;  // K
  int iterations = 0;
  double residual = 0.0;   // forward(tube_temp) - measured
  bool converged = false;
  InversionStatus status = InversionStatus::not_converged;
  std::string message;
};

/// Tube temperature whose forward signal matches `measured`, assuming the
/// scene parameters in `assumed` (its tube_temp is ignored).
/// Throws BracketError if `measured` is outside [S(lo), S(hi)] and
/// ConvergenceError if max_iterations is too small for the tolerance.
InversionResult invert_signal(ModelKind kind, const FurnaceScene& assumed, double measured,
                              const SolverConfig& cfg = {}, const QuadratureConfig& q = {});

/// Element-wise invert_signal. Failures are reported in the element's status
/// and message instead of aborting the batch.
std::vector<InversionResult> invert_batch(ModelKind kind, std::span<const FurnaceScene> assumed,
                                          std::span<const double> measured, const SolverConfig& cfg = {},
                                          const QuadratureConfig& q = {});

}  // namespace radtherm
