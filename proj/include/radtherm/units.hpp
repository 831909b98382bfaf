#pragma once

namespace radtherm {

inline constexpr double kCelsiusOffset = 273.15;

constexpr double celsius_to_kelvin(double celsius) { return celsius + kCelsiusOffset; }
constexpr double kelvin_to_celsius(double kelvin) { return kelvin - kCelsiusOffset; }

}  // namespace radtherm
