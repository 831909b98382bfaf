#pragma once

#include <cmath>

#include <Eigen/Core>

#include "radtherm/constants.hpp"
#include "radtherm/errors.hpp"

namespace radtherm {

/// Blackbody spectral radiance L_b(lambda, T) in W m^-2 sr^-1 um^-1.
/// `lambda_um` in micrometres, `temperature` in kelvin.
template <typename Scalar>
Scalar planck_radiance(Scalar lambda_um, Scalar temperature,
                       const PhysicalConstants<Scalar>& c = si_constants<Scalar>()) {
  if (!(lambda_um > Scalar(0)) || !(temperature > Scalar(0))) {
    throw DomainError("planck_radiance: wavelength and temperature must be positive");
  }
  using std::expm1;
  const Scalar l2 = lambda_um * lambda_um;
  return c.c1L / (l2 * l2 * lambda_um * expm1(c.c2 / (lambda_um * temperature)));
}

/// Vectorised form over a set of wavelengths (no domain check; callers pass
/// quadrature nodes on a validated band).
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> planck_radiance(
    const Eigen::ArrayBase<Derived>& lambda_um, typename Derived::Scalar temperature,
    const PhysicalConstants<typename Derived::Scalar>& c =
        si_constants<typename Derived::Scalar>()) {
  using Scalar = typename Derived::Scalar;
  if (!(temperature > Scalar(0))) {
    throw DomainError("planck_radiance: temperature must be positive");
  }
  const auto l2 = lambda_um.square();
  return c.c1L / (l2 * l2 * lambda_um * (c.c2 / (lambda_um * temperature)).expm1());
}

}  // namespace radtherm
