#ifndef STARFORMS_BOGOVSKII_HPP
#define STARFORMS_BOGOVSKII_HPP

#include "starforms/fields.hpp"
#include "starforms/mollifier.hpp"
#include "starforms/norms.hpp"
#include "starforms/poincare.hpp"

namespace starforms {

// Bogovskii-type operator in the ray representation with domain exit times,
//   B_l u(x) = int_B theta(z) int_1^T(x,z) t^(l-1) (z - x) -| u(z + t(x - z)) dt dz,
// u masked to the domain. The weakly singular neighbourhood of z = x is split
// off by a smooth radial partition: the grid sum carries the far factor chi,
// the polar near-field rule around x carries 1 - chi, where the polar Jacobian
// cancels the singularity. The exclusion radius is the configured cutoff,
// widened to a few grid cells so the ramp stays resolved.
struct BogovskiiConfig {
  Mollifier mollifier;
  StarDomain domain;
  int ell = 1;
  int t_quad_order = 16;
  int z_grid = 32;            // per-axis z nodes over the mollifier support
  double singular_cutoff;     // delta_z floor of the exclusion radius around x
  int near_angles = 16;       // angular nodes of the polar near-field rule
  int near_radial_order = 8;  // radial Gauss order of the polar near-field rule

  BogovskiiConfig(Mollifier m, StarDomain dom, int l)
      : mollifier(std::move(m)), domain(std::move(dom)), ell(l) {
    if (l < 1 || l > mollifier.dim())
      throw std::invalid_argument("BogovskiiConfig: need 1 <= ell <= n");
    if (mollifier.dim() != domain.dim())
      throw std::invalid_argument("BogovskiiConfig: dimension mismatch");
    check_support_inside(mollifier, domain.inscribed_ball());
    singular_cutoff = 1e-3 * 2.0 * domain.inscribed_ball().radius;
  }
};

namespace detail {

// quintic ramp: 0 for r <= delta/2, 1 for r >= delta, C^2 in between
inline double far_weight(double r, double delta) {
  double t = (2.0 * r - delta) / delta;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// One ray contribution: int_1^T t^pow g(z + t d) dt by plain Gauss in t. The
// kernel weight t^pow is polynomial for pow >= 0, and the integrand's features
// (the sampled form along the ray) are uniform in t, so no endpoint clustering
// is wanted; a clustered substitution was measured to starve the far end of
// long rays.
template <typename Accum>
inline void ray_integral(const GaussRule& rule, const Point& z, const Point& d, double T, int pow_t,
                         int n, Accum&& accumulate) {
  const double mid = 0.5 * (T + 1.0), half = 0.5 * (T - 1.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double t = mid + half * rule.nodes[i];
    double w = half * rule.weights[i] * std::pow(t, pow_t);
    Point y{};
    for (int ii = 0; ii < n; ++ii)
      y[static_cast<std::size_t>(ii)] =
          z[static_cast<std::size_t>(ii)] + t * d[static_cast<std::size_t>(ii)];
    accumulate(y, w);
  }
}

// unit directions for the polar near-field rule; uniform on the circle for
// n = 2, product rule for n = 3, the two endpoints for n = 1
inline std::vector<std::pair<Point, double>> sphere_rule(int n, int angles) {
  std::vector<std::pair<Point, double>> out;
  if (n == 1) {
    Point p{};
    p[0] = 1.0;
    out.emplace_back(p, 1.0);
    p[0] = -1.0;
    out.emplace_back(p, 1.0);
  } else if (n == 2) {
    for (int k = 0; k < angles; ++k) {
      double phi = 2.0 * M_PI * (k + 0.5) / angles;
      Point p{};
      p[0] = std::cos(phi);
      p[1] = std::sin(phi);
      out.emplace_back(p, 2.0 * M_PI / angles);
    }
  } else if (n == 3) {
    const GaussRule& rule = gauss_legendre(std::max(2, angles / 2));
    for (std::size_t ic = 0; ic < rule.nodes.size(); ++ic) {
      double c = rule.nodes[ic], s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int k = 0; k < angles; ++k) {
        double phi = 2.0 * M_PI * (k + 0.5) / angles;
        Point p{};
        p[0] = s * std::cos(phi);
        p[1] = s * std::sin(phi);
        p[2] = c;
        out.emplace_back(p, rule.weights[ic] * 2.0 * M_PI / angles);
      }
    }
  } else {
    // the excluded-ball mass is O(delta^{n-l+1}); above n = 3 no near field is
    // assembled and the omission is part of the reported quadrature error
  }
  return out;
}

// Shared near-field driver: integrates the (1 - chi)-weighted polar rewrite
//   int_S int_0^delta sigma^(n-1) K(sigma, xi) theta(x + sigma w) ... dxi dsigma dw
// where xi runs along the ray x - xi w up to the domain exit.
template <typename Term>
inline void near_field(const BogovskiiConfig& cfg, const Point& x, double delta, Term&& term) {
  const Mollifier& mol = cfg.mollifier;
  const int n = mol.dim();
  if (!cfg.domain.contains(x)) return;
  if (dist(x, mol.center(), n) >= mol.radius() + delta) return;
  auto dirs = sphere_rule(n, cfg.near_angles);
  const GaussRule& rad = gauss_legendre(cfg.near_radial_order);
  const GaussRule& ray = gauss_legendre(cfg.t_quad_order);
  for (const auto& [w_dir, w_ang] : dirs) {
    Point minus{};
    for (int i = 0; i < n; ++i) minus[static_cast<std::size_t>(i)] = -w_dir[static_cast<std::size_t>(i)];
    double Xi = cfg.domain.exit_param(x, minus);
    if (Xi <= 0.0) continue;
    for (std::size_t ir = 0; ir < rad.nodes.size(); ++ir) {
      double sigma = 0.5 * (rad.nodes[ir] + 1.0) * delta;
      double w_sig = 0.5 * rad.weights[ir] * delta * (1.0 - far_weight(sigma, delta));
      if (w_sig == 0.0) continue;
      Point zp = x;
      for (int i = 0; i < n; ++i)
        zp[static_cast<std::size_t>(i)] += sigma * w_dir[static_cast<std::size_t>(i)];
      double th = mol.eval(zp);
      if (th == 0.0) continue;
      for (std::size_t it = 0; it < ray.nodes.size(); ++it) {
        double xi = 0.5 * (ray.nodes[it] + 1.0) * Xi;
        double w_xi = 0.5 * ray.weights[it] * Xi;
        Point y = x;
        for (int i = 0; i < n; ++i)
          y[static_cast<std::size_t>(i)] -= xi * w_dir[static_cast<std::size_t>(i)];
        term(w_dir, zp, y, sigma, xi, w_ang * w_sig * w_xi * th);
      }
    }
  }
}

}  // namespace detail

// Apply B_l to a callable form at one point. The form is masked to the domain
// by construction: rays are truncated at the exit time and the near field at
// the directional exit, so u is never sampled outside.
inline FormValue apply_bogovskii(const BogovskiiConfig& cfg,
                                 const std::function<FormValue(const Point&)>& u, const Point& x) {
  const Mollifier& mol = cfg.mollifier;
  const int n = mol.dim(), ell = cfg.ell;
  FormValue out(n, ell - 1);

  const detail::SupportGrid& grid = detail::support_grid(mol, cfg.z_grid);
  const GaussRule& trule = gauss_legendre(cfg.t_quad_order);
  const double delta = std::max(cfg.singular_cutoff, 3.0 * grid.spacing);
  FormValue uval(n, ell), contracted(n, ell - 1), acc(n, ell - 1);

  for (std::size_t iz = 0; iz < grid.z.size(); ++iz) {
    const Point& z = grid.z[iz];
    Point d{}, zmx{};
    double dn = 0.0;
    for (int i = 0; i < n; ++i) {
      double di = x[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)];
      d[static_cast<std::size_t>(i)] = di;
      zmx[static_cast<std::size_t>(i)] = -di;
      dn += di * di;
    }
    dn = std::sqrt(dn);
    double chi = detail::far_weight(dn, delta);
    if (chi == 0.0) continue;
    double T = cfg.domain.ray_exit(z, x);
    if (T <= 1.0) continue;
    for (int c = 0; c < acc.components(); ++c) acc[c] = 0.0;
    detail::ray_integral(trule, z, d, T, ell - 1, n, [&](const Point& y, double w) {
      uval = u(y);
      contract_into(zmx, uval, contracted);
      for (int c = 0; c < acc.components(); ++c) acc[c] += w * contracted[c];
    });
    double scale = chi * grid.cell * grid.theta[iz];
    for (int c = 0; c < out.components(); ++c) out[c] += scale * acc[c];
  }

  detail::near_field(cfg, x, delta,
                     [&](const Point& w_dir, const Point&, const Point& y, double sigma, double xi,
                         double w) {
                       uval = u(y);
                       contract_into(w_dir, uval, contracted);
                       double k = w * std::pow(sigma, n - ell) * std::pow(sigma + xi, ell - 1);
                       for (int c = 0; c < out.components(); ++c) out[c] += k * contracted[c];
                     });
  return out;
}

// Scalar component operator in the same ray variables,
//   Q_i^l v(x) = int phi_i(z) int_1^T t^(l-2) v(z + t(x - z)) dt dz,
// with phi_1 = theta and phi_2 = z_m theta; m is 0-based.
inline double component_Q(const BogovskiiConfig& cfg, int i,
                          const std::function<double(const Point&)>& v, int m, const Point& x) {
  if (i != 1 && i != 2) throw std::invalid_argument("component_Q: i in {1, 2}");
  const Mollifier& mol = cfg.mollifier;
  const int n = mol.dim(), ell = cfg.ell;
  double out = 0.0;

  const detail::SupportGrid& grid = detail::support_grid(mol, cfg.z_grid);
  const GaussRule& trule = gauss_legendre(cfg.t_quad_order);
  const double delta = std::max(cfg.singular_cutoff, 3.0 * grid.spacing);
  for (std::size_t iz = 0; iz < grid.z.size(); ++iz) {
    const Point& z = grid.z[iz];
    Point d{};
    double dn = 0.0;
    for (int ii = 0; ii < n; ++ii) {
      double di = x[static_cast<std::size_t>(ii)] - z[static_cast<std::size_t>(ii)];
      d[static_cast<std::size_t>(ii)] = di;
      dn += di * di;
    }
    dn = std::sqrt(dn);
    double chi = detail::far_weight(dn, delta);
    if (chi == 0.0) continue;
    double T = cfg.domain.ray_exit(z, x);
    if (T <= 1.0) continue;
    double phi = grid.theta[iz];
    if (i == 2) phi *= z[static_cast<std::size_t>(m)];
    double acc = 0.0;
    detail::ray_integral(trule, z, d, T, ell - 2, n,
                         [&](const Point& y, double w) { acc += w * v(y); });
    out += chi * grid.cell * phi * acc;
  }

  detail::near_field(cfg, x, delta,
                     [&](const Point&, const Point& zp, const Point& y, double sigma, double xi,
                         double w) {
                       double phi = 1.0;
                       if (i == 2) phi = zp[static_cast<std::size_t>(m)];
                       out += w * phi * std::pow(sigma, n - ell) * std::pow(sigma + xi, ell - 2) * v(y);
                     });
  return out;
}

// d(B u) at x by 5-point Richardson central differences of apply_bogovskii.
inline FormValue bogovskii_d_fd(const BogovskiiConfig& cfg,
                                const std::function<FormValue(const Point&)>& u, const Point& x,
                                double h) {
  const int n = cfg.mollifier.dim(), ell = cfg.ell;
  FormValue out(n, ell);
  const auto& tab = detail::basis_table(n, ell - 1);
  for (int j = 1; j <= n; ++j) {
    Point e{};
    e[static_cast<std::size_t>(j - 1)] = 1.0;
    auto shift = [&](double s) {
      Point p = x;
      for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] += s * e[static_cast<std::size_t>(i)];
      return apply_bogovskii(cfg, u, p);
    };
    FormValue fp1 = shift(h), fm1 = shift(-h), fp2 = shift(2.0 * h), fm2 = shift(-2.0 * h);
    for (int a = 0; a < fp1.components(); ++a) {
      double d1 = (fp1[a] - fm1[a]) / (2.0 * h);
      double d2 = (fp2[a] - fm2[a]) / (4.0 * h);
      double dja = (4.0 * d1 - d2) / 3.0;
      const IndexTuple& I = tab.tuples[static_cast<std::size_t>(a)];
      if (I.contains(j)) continue;
      int below = 0;
      for (int mm = 0; mm < I.size(); ++mm)
        if (I[mm] < j) ++below;
      std::vector<int> seq{j};
      for (int mm = 0; mm < I.size(); ++mm) seq.push_back(I[mm]);
      std::sort(seq.begin(), seq.end());
      IndexTuple J;
      for (int idx : seq) J.push_back(idx);
      out[J] += ((below % 2 == 0) ? 1.0 : -1.0) * dja;
    }
  }
  return out;
}

struct ExactnessReport {
  double max_relative_residual = 0.0;
  double max_u = 0.0;
  int samples = 0;
};

// Residual of d(B_l u) = u for u = dw with w compactly supported inside the
// domain; derivative via finite differences with Richardson extrapolation.
inline ExactnessReport exactness_check_bogovskii(const BogovskiiConfig& cfg, const BumpForm& w,
                                                 double fd_step, const std::vector<Point>& samples) {
  const DomainStats stats = domain_stats(cfg.domain);
  if (fd_step > 0.01 * stats.R)
    throw std::invalid_argument("exactness_check_bogovskii: fd step " + std::to_string(fd_step) +
                                " too large relative to the domain (limit " +
                                std::to_string(0.01 * stats.R) + ")");
  auto u = [&w](const Point& y) { return w.d_value(y); };
  ExactnessReport rep;
  rep.samples = static_cast<int>(samples.size());
  for (const Point& x : samples) rep.max_u = std::max(rep.max_u, u(x).max_abs());
  if (rep.max_u == 0.0) return rep;
  for (const Point& x : samples) {
    FormValue dbu = bogovskii_d_fd(cfg, u, x, fd_step);
    FormValue diff = dbu - u(x);
    rep.max_relative_residual = std::max(rep.max_relative_residual, diff.max_abs() / rep.max_u);
  }
  return rep;
}

}  // namespace starforms

#endif
