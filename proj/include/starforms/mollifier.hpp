#ifndef STARFORMS_MOLLIFIER_HPP
#define STARFORMS_MOLLIFIER_HPP

#include <map>

#include "starforms/geometry.hpp"
#include "starforms/multipoly.hpp"
#include "starforms/quadrature.hpp"

namespace starforms {

// Normalized smooth bump theta(x) = A exp(-1/(1 - |x-c|^2/r^2)) supported on the
// closed ball of radius r about c, with a precomputed monomial-moment table.
//
// Moments are assembled from exact sphere integrals of monomials and a 1-D
// radial quadrature of the profile; center offsets enter through the binomial
// translation rule. Two radial refinement levels gate the accuracy of the
// normalization integral.
class Mollifier {
 public:
  int dim() const { return n_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  double normalization() const { return norm_a_; }
  int moment_degree() const { return dmax_; }

  double eval(const Point& x) const {
    double w = inside_w(x);
    if (w <= kWFloor) return 0.0;
    return norm_a_ * std::exp(-1.0 / w);
  }

  // d theta / dx_j
  double eval_derivative(const Point& x, int j) const {
    double w = inside_w(x);
    if (w <= kWFloor) return 0.0;
    double th = norm_a_ * std::exp(-1.0 / w);
    double gj = 2.0 * (x[static_cast<std::size_t>(j)] - center_[static_cast<std::size_t>(j)]) /
                (radius_ * radius_);
    return -th * gj / (w * w);
  }

  // d^2 theta / dx_k dx_j
  double eval_second_derivative(const Point& x, int j, int k) const {
    double w = inside_w(x);
    if (w <= kWFloor) return 0.0;
    double th = norm_a_ * std::exp(-1.0 / w);
    double r2 = radius_ * radius_;
    double gj = 2.0 * (x[static_cast<std::size_t>(j)] - center_[static_cast<std::size_t>(j)]) / r2;
    double gk = 2.0 * (x[static_cast<std::size_t>(k)] - center_[static_cast<std::size_t>(k)]) / r2;
    double djk = (j == k) ? 1.0 : 0.0;
    return th * (gj * gk / (w * w * w * w) - 2.0 * djk / (r2 * w * w) - 2.0 * gj * gk / (w * w * w));
  }

  // integral z^alpha theta(z) dz; alpha must be within the tabulated degree
  double moment(const Expo& alpha) const {
    int d = expo_degree(alpha);
    if (d > dmax_)
      throw std::invalid_argument("Mollifier: moment table holds degrees <= " + std::to_string(dmax_) +
                                  ", requested degree " + std::to_string(d));
    auto it = moments_.find(alpha);
    if (it == moments_.end()) throw std::invalid_argument("Mollifier: moment index outside table");
    return it->second;
  }

  const std::map<Expo, double>& moment_table() const { return moments_; }

  friend Mollifier build_bump(int n, const Point& center, double radius, int moment_degree,
                              int quad_order);

 private:
  static constexpr double kWFloor = 1e-8;

  double inside_w(const Point& x) const {
    double q = 0.0;
    for (int i = 0; i < n_; ++i) {
      double d = x[static_cast<std::size_t>(i)] - center_[static_cast<std::size_t>(i)];
      q += d * d;
    }
    q /= radius_ * radius_;
    return 1.0 - q;
  }

  int n_ = 0;
  Point center_{};
  double radius_ = 0.0;
  double norm_a_ = 0.0;
  int dmax_ = 0;
  std::map<Expo, double> moments_;
};

namespace detail {

// integral over the unit sphere S^{n-1} of w^alpha; closed form, zero when any
// exponent is odd
inline double sphere_monomial_integral(const Expo& alpha, int n) {
  for (int i = 0; i < n; ++i)
    if (alpha[static_cast<std::size_t>(i)] % 2 != 0) return 0.0;
  double num = 2.0, bsum = 0.0;
  for (int i = 0; i < n; ++i) {
    double b = 0.5 * (alpha[static_cast<std::size_t>(i)] + 1);
    num *= std::tgamma(b);
    bsum += b;
  }
  return num / std::tgamma(bsum);
}

inline void enumerate_expos(int n, int dmax, std::vector<Expo>& out) {
  Expo e{};
  std::function<void(int, int)> rec = [&](int var, int left) {
    if (var == n) {
      out.push_back(e);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[static_cast<std::size_t>(var)] = k;
      rec(var + 1, left - k);
    }
    e[static_cast<std::size_t>(var)] = 0;
  };
  rec(0, dmax);
}

}  // namespace detail

inline Mollifier build_bump(int n, const Point& center, double radius, int moment_degree = 12,
                            int quad_order = 24) {
  check_dim(n);
  if (radius <= 0.0) throw std::invalid_argument("build_bump: radius must be > 0");
  if (moment_degree < 0) throw std::invalid_argument("build_bump: moment degree must be >= 0");

  // radial integrals I_k = int_0^1 exp(-1/(1-s^2)) s^(k+n-1) ds at two
  // refinement levels
  auto radial = [&](int k, int panels) {
    return composite_gauss(
        [&](double s) {
          double w = 1.0 - s * s;
          return (w > 1e-14) ? std::exp(-1.0 / w) * std::pow(s, k + n - 1) : 0.0;
        },
        0.0, 1.0, quad_order, panels);
  };

  const int panels = 8;
  double mass_lo = radial(0, panels);
  double mass_hi = radial(0, 2 * panels);
  if (std::abs(mass_hi - mass_lo) > 1e-10 * std::abs(mass_hi))
    throw std::runtime_error("build_bump: radial quadrature did not converge to 1e-10");

  std::vector<double> rad(static_cast<std::size_t>(moment_degree) + 1);
  for (int k = 0; k <= moment_degree; ++k) rad[static_cast<std::size_t>(k)] = radial(k, 2 * panels);

  Mollifier m;
  m.n_ = n;
  m.center_ = center;
  m.radius_ = radius;
  m.dmax_ = moment_degree;

  Expo zero{};
  double ang0 = detail::sphere_monomial_integral(zero, n);
  m.norm_a_ = 1.0 / (ang0 * rad[0] * std::pow(radius, n));

  // centered moments, then binomial translation to the actual center
  std::vector<Expo> expos;
  detail::enumerate_expos(n, moment_degree, expos);
  std::map<Expo, double> centered;
  for (const Expo& a : expos) {
    int d = expo_degree(a);
    centered[a] = m.norm_a_ * detail::sphere_monomial_integral(a, n) *
                  rad[static_cast<std::size_t>(d)] * std::pow(radius, d + n);
  }
  for (const Expo& a : expos) {
    double tot = 0.0;
    std::function<void(int, Expo, double)> rec = [&](int var, Expo b, double coef) {
      if (var == n) {
        tot += coef * centered[b];
        return;
      }
      int ai = a[static_cast<std::size_t>(var)];
      double binom = 1.0;
      for (int k = 0; k <= ai; ++k) {
        Expo b2 = b;
        b2[static_cast<std::size_t>(var)] = k;
        double cpow = std::pow(center[static_cast<std::size_t>(var)], ai - k);
        rec(var + 1, b2, coef * binom * cpow);
        binom = binom * (ai - k) / (k + 1);
      }
    };
    rec(0, Expo{}, 1.0);
    m.moments_[a] = tot;
  }
  // exact unit mass by construction of the normalization
  m.moments_[zero] = 1.0;
  return m;
}

enum class PhiVariant { theta, z_m_theta };

// C(phi, rho) = rho^{-1} ||phi||_L1 + rho ||d_j^2 phi||_L1 for phi = theta or
// phi = z_m theta. The L1 integrals run over the support by midpoint rule on a
// grid that scales with the support, so fixed-profile scaling identities hold
// to roundoff.
inline double c_phi_constant(const Mollifier& m, PhiVariant variant, int j, double rho, int m_index = 0,
                             int grid = 200) {
  if (rho <= 0.0) throw std::invalid_argument("c_phi_constant: rho must be > 0");
  const int n = m.dim();
  const double r = m.radius();
  const double h = 2.0 * r / grid;
  double l1 = 0.0, l1_d2 = 0.0;

  std::array<int, kMaxDim> idx{};
  while (true) {
    Point p{};
    for (int i = 0; i < n; ++i)
      p[static_cast<std::size_t>(i)] =
          m.center()[static_cast<std::size_t>(i)] - r + (idx[static_cast<std::size_t>(i)] + 0.5) * h;
    double th = m.eval(p);
    double zm = p[static_cast<std::size_t>(m_index)];
    double phi, d2phi;
    if (variant == PhiVariant::theta) {
      phi = th;
      d2phi = m.eval_second_derivative(p, j, j);
    } else {
      phi = zm * th;
      // d_j^2 (z_m theta) = z_m d_j^2 theta + 2 delta_{jm} d_j theta
      d2phi = zm * m.eval_second_derivative(p, j, j);
      if (j == m_index) d2phi += 2.0 * m.eval_derivative(p, j);
    }
    l1 += std::abs(phi);
    l1_d2 += std::abs(d2phi);
    int carry = 0;
    while (carry < n) {
      if (++idx[static_cast<std::size_t>(carry)] < grid) break;
      idx[static_cast<std::size_t>(carry)] = 0;
      ++carry;
    }
    if (carry == n) break;
  }
  double cellvol = std::pow(h, n);
  return (l1 * cellvol) / rho + rho * (l1_d2 * cellvol);
}

inline void check_support_inside(const Mollifier& m, const BallShape& ball) {
  double gap = dist(m.center(), ball.center, m.dim()) + m.radius() - ball.radius;
  if (gap > 1e-12)
    throw std::invalid_argument("mollifier support must lie inside the star ball (violated by " +
                                std::to_string(gap) + ")");
}

}  // namespace starforms

#endif
