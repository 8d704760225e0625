#ifndef STARFORMS_QUADRATURE_HPP
#define STARFORMS_QUADRATURE_HPP

#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "starforms/common.hpp"

namespace starforms {

// Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_k.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline const GaussRule& gauss_legendre(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  if (order < 1) throw std::invalid_argument("gauss_legendre: order >= 1 required");

  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(order));
  r.weights.resize(static_cast<std::size_t>(order));
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < order; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  return cache.emplace(order, std::move(r)).first->second;
}

// integral of f over [a, b] with an `order`-point Gauss rule
inline double gauss_integrate(const std::function<double(double)>& f, double a, double b, int order) {
  const GaussRule& r = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

// composite Gauss rule: `panels` uniform panels of `order` points each
inline double composite_gauss(const std::function<double(double)>& f, double a, double b, int order,
                              int panels) {
  double s = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) s += gauss_integrate(f, a + p * h, a + (p + 1) * h, order);
  return s;
}

}  // namespace starforms

#endif
