#include "radtherm/spectral_curve.hpp"

#include <algorithm>
#include <cmath>

#include "radtherm/errors.hpp"

namespace radtherm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double interpolate(const SpectralCurve::Tabulated& t, double lambda) {
  const auto& xs = t.wavelengths;
  if (lambda <= xs.front()) return t.values.front();
  if (lambda >= xs.back()) return t.values.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), lambda);
  const auto hi = static_cast<std::size_t>(it - xs.begin());
  const auto lo = hi - 1;
  const double f = (lambda - xs[lo]) / (xs[hi] - xs[lo]);
  return t.values[lo] + f * (t.values[hi] - t.values[lo]);
}

}  // namespace

SpectralCurve SpectralCurve::constant(double value) {
  if (!std::isfinite(value)) throw DomainError("constant curve: value must be finite");
  return SpectralCurve(Constant{value});
}

SpectralCurve SpectralCurve::bell(double height, double mean, double sigma) {
  if (!std::isfinite(height) || !std::isfinite(mean) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("bell curve: height and mean must be finite, sigma positive");
  }
  return SpectralCurve(Bell{height, mean, sigma});
}

SpectralCurve SpectralCurve::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.empty()) throw DomainError("tabulated curve: no samples");
  Tabulated t;
  t.wavelengths.reserve(samples.size());
  t.values.reserve(samples.size());
  for (const auto& [x, y] : samples) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("tabulated curve: non-finite sample");
    if (!t.wavelengths.empty() && !(x > t.wavelengths.back())) {
      throw DomainError("tabulated curve: wavelengths must be strictly increasing");
    }
    t.wavelengths.push_back(x);
    t.values.push_back(y);
  }
  return SpectralCurve(std::move(t));
}

SpectralCurve::Kind SpectralCurve::kind() const {
  return static_cast<Kind>(repr_.index());
}

double SpectralCurve::operator()(double lambda) const {
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.value; },
                        [lambda](const Bell& b) {
                          const double d = lambda - b.mean;
                          return b.height * std::exp(-(d * d) / (2.0 * b.sigma * b.sigma));
                        },
                        [lambda](const Tabulated& t) { return interpolate(t, lambda); },
                    },
                    repr_);
}

Eigen::ArrayXd SpectralCurve::operator()(const Eigen::ArrayXd& lambda) const {
  return std::visit(Overloaded{
                        [&](const Constant& c) -> Eigen::ArrayXd {
                          return Eigen::ArrayXd::Constant(lambda.size(), c.value);
                        },
                        [&](const Bell& b) -> Eigen::ArrayXd {
                          return b.height * (-(lambda - b.mean).square() / (2.0 * b.sigma * b.sigma)).exp();
                        },
                        [&](const Tabulated& t) -> Eigen::ArrayXd {
                          return lambda.unaryExpr([&t](double x) { return interpolate(t, x); });
                        },
                    },
                    repr_);
}

double SpectralCurve::height() const {
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.value; },
                        [](const Bell& b) { return b.height; },
                        [](const Tabulated& t) { return *std::max_element(t.values.begin(), t.values.end()); },
                    },
                    repr_);
}

SpectralCurve SpectralCurve::with_height(double height) const {
  return std::visit(Overloaded{
                        [height](const Constant&) { return constant(height); },
                        [height](const Bell& b) { return bell(height, b.mean, b.sigma); },
                        [height](const Tabulated& t) {
                          const double peak = *std::max_element(t.values.begin(), t.values.end());
                          if (peak == 0.0) throw DomainError("with_height: tabulated curve is identically zero");
                          std::vector<std::pair<double, double>> samples;
                          for (std::size_t i = 0; i < t.values.size(); ++i) {
                            samples.emplace_back(t.wavelengths[i], t.values[i] * (height / peak));
                          }
                          return tabulated(std::move(samples));
                        },
                    },
                    repr_);
}

std::pair<double, double> SpectralCurve::bounds() const {
  return std::visit(Overloaded{
                        [](const Constant& c) { return std::pair{c.value, c.value}; },
                        [](const Bell& b) { return std::pair{std::min(0.0, b.height), std::max(0.0, b.height)}; },
                        [](const Tabulated& t) {
                          const auto [lo, hi] = std::minmax_element(t.values.begin(), t.values.end());
                          return std::pair{*lo, *hi};
                        },
                    },
                    repr_);
}

}  // namespace radtherm
