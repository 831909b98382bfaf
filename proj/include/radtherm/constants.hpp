#pragma once

namespace radtherm {

/// Radiation constants. `c1L` and `c2` are kept in micrometre-based units so
/// that Planck's law can be evaluated directly with wavelengths in um:
///   c1L [W um^4 m^-2 sr^-1] = 2 h c0^2 * 1e24
///   c2  [um K]              = h c0 / kB * 1e6
template <typename Scalar = double>
struct PhysicalConstants {
  Scalar planck_h;        // J s
  Scalar boltzmann_kB;    // J / K
  Scalar light_speed_c0;  // m / s
  Scalar c1L;
  Scalar c2;
};

/// SI 2019 exact defining constants.
template <typename Scalar = double>
constexpr PhysicalConstants<Scalar> si_constants() {
  return PhysicalConstants<Scalar>{
      Scalar(6.62607015e-34L),
      Scalar(1.380649e-23L),
      Scalar(299792458.0L),
      Scalar(119104297.23971884141L),
      Scalar(14387.768775039338021L),
  };
}

}  // namespace radtherm
