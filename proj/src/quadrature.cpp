#include "radtherm/quadrature.hpp"

#include <map>
#include <mutex>

namespace radtherm {

namespace {

std::shared_ptr<const QuadratureRule<double>> cached_gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const QuadratureRule<double>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const QuadratureRule<double>>(gauss_legendre_rule<double>(n));
  return slot;
}

}  // namespace

QuadratureRule<double> band_rule(const Band& band, const QuadratureConfig& q) {
  q.validate();
  const double half = 0.5 * band.width();
  const double mid = band.center();
  QuadratureRule<double> out;
  switch (q.scheme) {
    case QuadratureScheme::gauss_legendre: {
      const auto ref = cached_gauss_legendre(q.node_count);
      out.nodes = mid + half * ref->nodes;
      out.weights = half * ref->weights;
      break;
    }
    case QuadratureScheme::midpoint: {
      const double h = band.width() / q.node_count;
      out.nodes = band.lo() + h * (Eigen::ArrayXd::LinSpaced(q.node_count, 0, q.node_count - 1) + 0.5);
      out.weights = Eigen::ArrayXd::Constant(q.node_count, h);
      break;
    }
  }
  return out;
}

}  // namespace radtherm
