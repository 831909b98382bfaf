#pragma once

#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace radtherm {

/// A dimensionless function of wavelength: emissivity, gas absorption or
/// detector responsivity.
class SpectralCurve {
 public:
  enum class Kind { constant, bell, tabulated };

  struct Constant {
    double value;
    bool operator==(const Constant&) const = default;
  };
  /// h * exp(-(lambda - mu)^2 / (2 sigma^2))
  struct Bell {
    double height;
    double mean;
    double sigma;
    bool operator==(const Bell&) const = default;
  };
  /// Piecewise linear through (wavelength, value) samples, clamped outside.
  struct Tabulated {
    std::vector<double> wavelengths;
    std::vector<double> values;
    bool operator==(const Tabulated&) const = default;
  };

  SpectralCurve() : SpectralCurve(constant(1.0)) {}

  static SpectralCurve constant(double value);
  static SpectralCurve bell(double height, double mean, double sigma);
  static SpectralCurve tabulated(std::vector<std::pair<double, double>> samples);

  Kind kind() const;
  double operator()(double lambda_um) const;
  Eigen::ArrayXd operator()(const Eigen::ArrayXd& lambda_um) const;

  /// Peak value: the constant, the bell height, or the largest sample.
  double height() const;
  /// Same shape with its height replaced; tabulated curves are rescaled.
  SpectralCurve with_height(double height) const;
  /// Conservative (min, max) over all wavelengths.
  std::pair<double, double> bounds() const;

  const Constant* as_constant() const { return std::get_if<Constant>(&repr_); }
  const Bell* as_bell() const { return std::get_if<Bell>(&repr_); }
  const Tabulated* as_tabulated() const { return std::get_if<Tabulated>(&repr_); }

  bool operator==(const SpectralCurve&) const = default;

 private:
  using Repr = std::variant<Constant, Bell, Tabulated>;
  explicit SpectralCurve(Repr repr) : repr_(std::move(repr)) {}
  Repr repr_;

};

inline double eval_curve(const SpectralCurve& curve, double lambda_um) { return curve(lambda_um); }

}  // namespace radtherm
