#ifndef STARFORMS_POINCARE_HPP
#define STARFORMS_POINCARE_HPP

#include <tuple>

#include "starforms/fields.hpp"
#include "starforms/mollifier.hpp"
#include "starforms/quadrature.hpp"

namespace starforms {

// Poincare-type operator in the nonsingular (z, s) representation
//   P_l u(x) = int theta(z) int_0^1 s^(l-1) (x - z) -| u(s x + (1-s) z) ds dz.
// The polynomial path integrates s analytically and z through the moment
// table; the callable path uses Gauss in s and a masked grid on the support.
struct PoincareConfig {
  Mollifier mollifier;
  int ell = 1;
  int s_quad_order = 16;
  int z_grid = 32;  // per-axis z nodes over the mollifier support (callable path)

  PoincareConfig(Mollifier m, int l) : mollifier(std::move(m)), ell(l) {
    if (l < 1 || l > mollifier.dim())
      throw std::invalid_argument("PoincareConfig: need 1 <= ell <= n");
  }
};

namespace detail {

// Beta(a, b) for positive integers via the stable recurrence.
inline double beta_int(int a, int b) {
  double v = 1.0 / a;
  for (int i = 1; i < b; ++i) v = v * i / (a + i);
  return v;
}

// Core of the moment-exact path. Expands f(s x + (1-s) z) binomially and
// integrates: s against s^(k-1) analytically, z against the moment table.
// `extra` shifts the z-monomial (0 none, else 1-based coordinate index for an
// extra factor z_m), used for the phi_2 = z_m theta weight.
inline MultiPoly poincare_scalar_kernel(const Mollifier& mol, int k, const MultiPoly& f, int extra) {
  const int n = mol.dim();
  MultiPoly out(n);
  for (const auto& [alpha, c] : f.terms()) {
    // enumerate beta <= alpha
    Expo beta{};
    std::function<void(int, double)> rec = [&](int var, double binom) {
      if (var == n) {
        int ab = 0, db = 0;
        Expo zm{};
        for (int i = 0; i < n; ++i) {
          ab += beta[static_cast<std::size_t>(i)];
          zm[static_cast<std::size_t>(i)] =
              alpha[static_cast<std::size_t>(i)] - beta[static_cast<std::size_t>(i)];
          db += zm[static_cast<std::size_t>(i)];
        }
        if (extra > 0) ++zm[static_cast<std::size_t>(extra - 1)];
        double w = beta_int(k + ab, db + 1);
        out.add_term(beta, c * binom * w * mol.moment(zm));
        return;
      }
      int ai = alpha[static_cast<std::size_t>(var)];
      double b = 1.0;
      for (int kk = 0; kk <= ai; ++kk) {
        beta[static_cast<std::size_t>(var)] = kk;
        rec(var + 1, binom * b);
        b = b * (ai - kk) / (kk + 1);
      }
      beta[static_cast<std::size_t>(var)] = 0;
    };
    rec(0, 1.0);
  }
  out.normalize();
  return out;
}

}  // namespace detail

// P_i^k f as a polynomial (moment-exact): i = 1 uses phi_1 = theta, i = 2 uses
// phi_2(z) = z_m theta(z); m is 0-based.
inline MultiPoly component_P_poly(const Mollifier& mol, int i, int k, const MultiPoly& f, int m) {
  if (i != 1 && i != 2) throw std::invalid_argument("component_P_poly: i in {1, 2}");
  if (k < 1) throw std::invalid_argument("component_P_poly: k >= 1");
  return detail::poincare_scalar_kernel(mol, k, f, i == 2 ? m + 1 : 0);
}

// Reduced scalar operator P_l f = x_m P_1^l f - P_2^l f (moment-exact).
inline MultiPoly reduced_poincare_poly(const Mollifier& mol, int ell, const MultiPoly& f, int m) {
  MultiPoly xm = MultiPoly::variable(mol.dim(), m);
  return xm * component_P_poly(mol, 1, ell, f, m) - component_P_poly(mol, 2, ell, f, m);
}

// Moment-exact application to a polynomial form; output is the polynomial
// (l-1)-form, exact up to moment-table precision.
inline PolyForm apply_poincare_poly(const PoincareConfig& cfg, const PolyForm& u) {
  const Mollifier& mol = cfg.mollifier;
  const int n = mol.dim(), ell = cfg.ell;
  if (u.dim() != n || u.degree() != ell)
    throw std::invalid_argument("apply_poincare_poly: form degree mismatch with config");
  int need = u.poly_degree() + 1;
  if (need > mol.moment_degree() && !u.is_zero())
    throw std::invalid_argument("apply_poincare_poly: moment table degree " +
                                std::to_string(mol.moment_degree()) + " too small, need " +
                                std::to_string(need));
  PolyForm out(n, ell - 1);
  for (int a = 0; a < u.components(); ++a) {
    if (u[a].is_zero()) continue;
    const IndexTuple& I = u.tuple(a);
    for (int m = 0; m < ell; ++m) {
      MultiPoly g = reduced_poincare_poly(mol, ell, u[a], I[m] - 1);
      double sgn = (m % 2 == 0) ? 1.0 : -1.0;
      out[I.drop(m)] += sgn * g;
    }
  }
  return out;
}

namespace detail {

struct SupportGrid {
  std::vector<Point> z;
  std::vector<double> theta;
  double cell = 0.0;
  double spacing = 0.0;
};

inline SupportGrid build_support_grid(const Mollifier& mol, int per_axis) {
  SupportGrid g;
  const int n = mol.dim();
  const double r = mol.radius(), h = 2.0 * r / per_axis;
  g.cell = std::pow(h, n);
  g.spacing = h;
  std::array<int, kMaxDim> idx{};
  while (true) {
    Point p{};
    for (int i = 0; i < n; ++i)
      p[static_cast<std::size_t>(i)] =
          mol.center()[static_cast<std::size_t>(i)] - r + (idx[static_cast<std::size_t>(i)] + 0.5) * h;
    double th = mol.eval(p);
    if (th > 0.0) {
      g.z.push_back(p);
      g.theta.push_back(th);
    }
    int carry = 0;
    while (carry < n) {
      if (++idx[static_cast<std::size_t>(carry)] < per_axis) break;
      idx[static_cast<std::size_t>(carry)] = 0;
      ++carry;
    }
    if (carry == n) break;
  }
  return g;
}

// grids are memoized on the bump's value identity; evaluation loops hit this
// once per (mollifier, resolution) pair
inline const SupportGrid& support_grid(const Mollifier& mol, int per_axis) {
  using Key = std::tuple<int, double, double, double, double, double, double, double, int>;
  static std::map<Key, SupportGrid> cache;
  static std::mutex mtx;
  const Point& c = mol.center();
  Key key{mol.dim(), c[0], c[1], c[2], c[3], c[4], c[5], mol.radius(), per_axis};
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  return cache.emplace(key, build_support_grid(mol, per_axis)).first->second;
}

}  // namespace detail

// Quadrature path for a general callable form: Gauss in s, masked grid in z.
inline FormValue apply_poincare_quad(const PoincareConfig& cfg,
                                     const std::function<FormValue(const Point&)>& u, const Point& x) {
  const Mollifier& mol = cfg.mollifier;
  const int n = mol.dim(), ell = cfg.ell;
  const detail::SupportGrid& grid = detail::support_grid(mol, cfg.z_grid);
  const GaussRule& rule = gauss_legendre(cfg.s_quad_order);

  FormValue out(n, ell - 1);
  FormValue contracted(n, ell - 1);
  for (std::size_t iz = 0; iz < grid.z.size(); ++iz) {
    const Point& z = grid.z[iz];
    Point d{};
    for (int i = 0; i < n; ++i)
      d[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)];
    FormValue acc(n, ell - 1);
    for (std::size_t is = 0; is < rule.nodes.size(); ++is) {
      double s = 0.5 * (rule.nodes[is] + 1.0);
      double w = 0.5 * rule.weights[is] * std::pow(s, ell - 1);
      Point y{};
      for (int i = 0; i < n; ++i)
        y[static_cast<std::size_t>(i)] = s * x[static_cast<std::size_t>(i)] +
                                         (1.0 - s) * z[static_cast<std::size_t>(i)];
      FormValue uv = u(y);
      contract_into(d, uv, contracted);
      for (int c = 0; c < acc.components(); ++c) acc[c] += w * contracted[c];
    }
    for (int c = 0; c < out.components(); ++c) out[c] += grid.cell * grid.theta[iz] * acc[c];
  }
  return out;
}

// Scalar component operator on a callable, P_i^k f(x); m is 0-based.
inline double component_P(const PoincareConfig& cfg, int i, int k,
                          const std::function<double(const Point&)>& f, int m, const Point& x) {
  if (i != 1 && i != 2) throw std::invalid_argument("component_P: i in {1, 2}");
  if (k < 1) throw std::invalid_argument("component_P: k >= 1");
  const Mollifier& mol = cfg.mollifier;
  const int n = mol.dim();
  const detail::SupportGrid& grid = detail::support_grid(mol, cfg.z_grid);
  const GaussRule& rule = gauss_legendre(cfg.s_quad_order);
  double out = 0.0;
  for (std::size_t iz = 0; iz < grid.z.size(); ++iz) {
    const Point& z = grid.z[iz];
    double phi = grid.theta[iz];
    if (i == 2) phi *= z[static_cast<std::size_t>(m)];
    double acc = 0.0;
    for (std::size_t is = 0; is < rule.nodes.size(); ++is) {
      double s = 0.5 * (rule.nodes[is] + 1.0);
      double w = 0.5 * rule.weights[is] * std::pow(s, k - 1);
      Point y{};
      for (int ii = 0; ii < n; ++ii)
        y[static_cast<std::size_t>(ii)] = s * x[static_cast<std::size_t>(ii)] +
                                          (1.0 - s) * z[static_cast<std::size_t>(ii)];
      acc += w * f(y);
    }
    out += grid.cell * phi * acc;
  }
  return out;
}

// Residual of the first-derivative identity
//   d_j P_l f = delta_{jm} P_1^l f + x_m d_j P_1^l f - d_j P_2^l f
// at the point x, everything on the moment-exact symbolic path. (The sign of
// the last term follows from P_l = x_m P_1^l - P_2^l.)
inline double poincare_gradient_check(const PoincareConfig& cfg, const MultiPoly& f, int m, int j,
                                      const Point& x) {
  const Mollifier& mol = cfg.mollifier;
  const int n = mol.dim(), ell = cfg.ell;
  MultiPoly lhs = reduced_poincare_poly(mol, ell, f, m).derivative(j);
  MultiPoly p1 = component_P_poly(mol, 1, ell, f, m);
  MultiPoly p2 = component_P_poly(mol, 2, ell, f, m);
  MultiPoly rhs = MultiPoly::variable(n, m) * p1.derivative(j) - p2.derivative(j);
  if (j == m) rhs += p1;
  return std::abs(lhs.evaluate(x) - rhs.evaluate(x));
}

// Residual of the |alpha| = 1 case of the higher-derivative expansion,
//   d_j d_a P_l f = delta_{jm} P_1^{l+1}[d_a f] + x_m d_j P_1^{l+1}[d_a f]
//                 + delta_{am} d_j P_1^l[f] - d_j P_2^{l+1}[d_a f],
// at the point x (moment-exact path); a and j are 0-based directions.
inline double poincare_second_derivative_check(const PoincareConfig& cfg, const MultiPoly& f, int m,
                                               int j, int a, const Point& x) {
  const Mollifier& mol = cfg.mollifier;
  const int n = mol.dim(), ell = cfg.ell;
  MultiPoly lhs = reduced_poincare_poly(mol, ell, f, m).derivative(a).derivative(j);
  MultiPoly da = f.derivative(a);
  MultiPoly p1a = component_P_poly(mol, 1, ell + 1, da, m);
  MultiPoly p2a = component_P_poly(mol, 2, ell + 1, da, m);
  MultiPoly rhs = MultiPoly::variable(n, m) * p1a.derivative(j) - p2a.derivative(j);
  if (j == m) rhs += p1a;
  if (a == m) rhs += component_P_poly(mol, 1, ell, f, m).derivative(j);
  return std::abs(lhs.evaluate(x) - rhs.evaluate(x));
}

}  // namespace starforms

#endif
