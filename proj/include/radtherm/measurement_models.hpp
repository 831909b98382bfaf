#pragma once

#include <string>
#include <string_view>

#include "radtherm/quadrature.hpp"
#include "radtherm/spectral_curve.hpp"

namespace radtherm {

/// Nested measurement models: A blackbody, B selective radiator,
/// C + wall reflections, D + gas absorption/emission.
enum class ModelKind { A, B, C, D };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// Ground truth (or the thermometer's assumptions) for one line of sight:
/// an opaque tube seen through an absorbing, emitting gas inside a hot
/// enclosure. Temperatures in kelvin, wavelengths in micrometres.
/// Reflectance of the opaque tube is 1 - emissivity.
struct FurnaceScene {
  double tube_temp = 1223.15;
  double wall_temp = 1378.15;
  double gas_temp = 1253.15;
  SpectralCurve emissivity = SpectralCurve::constant(0.82);
  SpectralCurve absorption = SpectralCurve::constant(0.05);
  double path_length = 1.0;
  SpectralCurve responsivity = SpectralCurve::constant(1.0);
  Band band = Band(3.7, 4.2);

  /// Throws DomainError when a field used by `kind` violates its invariant.
  void validate(ModelKind kind = ModelKind::D) const;

  FurnaceScene with_tube_temp(double t) const {
    FurnaceScene s = *this;
    s.tube_temp = t;
    return s;
  }
};

/// The three irradiance contributions reaching the sensor under model D.
struct SignalDecomposition {
  double g_emit_prime = 0.0;     // tube emission attenuated by the gas
  double g_reflect_prime = 0.0;  // wall radiation reflected by the tube, attenuated
  double g_gas = 0.0;            // gas emission
  double g_sensor = 0.0;         // sum of the above
};

/// Band-integrated signal for the given model (W m^-2 sr^-1).
double forward_signal(ModelKind kind, const FurnaceScene& scene, const QuadratureConfig& q = {});

/// Model D split into its components; g_sensor equals forward_signal(D).
SignalDecomposition decompose(const FurnaceScene& scene, const QuadratureConfig& q = {});

}  // namespace radtherm
