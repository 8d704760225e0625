#ifndef STARFORMS_CONSTANTS_HPP
#define STARFORMS_CONSTANTS_HPP

#include "starforms/bogovskii.hpp"

namespace starforms {

enum class OperatorKind { poincare, bogovskii };

inline const char* kind_name(OperatorKind k) {
  return k == OperatorKind::poincare ? "poincare" : "bogovskii";
}

namespace detail {
inline void check_kappa_args(int n, int ell, const DomainStats& stats) {
  check_dim(n);
  if (ell < 1 || ell > n) throw std::invalid_argument("kappa: need 1 <= ell <= n");
  if (stats.ratio_vol < 1.0)
    throw std::invalid_argument("kappa: degenerate geometry, |Omega|/|B| < 1");
}
}  // namespace detail

// Geometry amplification factor of the H^1 bound for the Poincare-type
// operator. Case split on 2 ell against n; the log exponent differs between
// the middle and small-ell cases as printed in the source theorem. The value
// extends continuously to ratio_vol = 1 (vanishing log), which the sweep's
// most symmetric family member realizes.
inline double kappa_poincare(int n, int ell, const DomainStats& stats) {
  detail::check_kappa_args(n, ell, stats);
  if (2 * ell > n) return 1.0;
  double ratio = stats.ratio_vol;
  double power = (n - 2.0 * ell) / (2.0 * (n - ell));
  double logexp = (2 * ell >= n - 1) ? n / (2.0 * (n - ell)) : n / (2.0 * (n - ell - 1));
  return std::pow(ratio, power) * std::pow(std::log(ratio), logexp);
}

// Same for the Bogovskii-type operator: kappa = 1 below ell = n/2 + 1, else
// 1 plus the log-power correction.
inline double kappa_bogovskii(int n, int ell, const DomainStats& stats) {
  detail::check_kappa_args(n, ell, stats);
  if (ell < 0.5 * n + 1.0) return 1.0;
  double ratio = stats.ratio_vol;
  double logexp = n / (2.0 * (ell - 1.0));
  double power = (2.0 * (ell - 1.0) - n) / (2.0 * (ell - 1.0));
  return 1.0 + std::pow(std::log(ratio), logexp) * std::pow(ratio, power);
}

inline double kappa(OperatorKind kind, int n, int ell, const DomainStats& stats) {
  return kind == OperatorKind::poincare ? kappa_poincare(n, ell, stats)
                                        : kappa_bogovskii(n, ell, stats);
}

// H^1 continuity bound scale * (R/rho) * kappa. `scale` stands in for the
// dimensional constant C(n, ell) the theory leaves unspecified.
inline double h1_bound(OperatorKind kind, int n, int ell, const DomainStats& stats, double scale) {
  if (scale <= 0.0) throw std::invalid_argument("h1_bound: scale must be > 0");
  return scale * stats.ratio_diam * kappa(kind, n, ell, stats);
}

// H^2 bound scale / rho for the Poincare-type operator; only available in the
// regime 2 ell > n.
inline double h2_bound_poincare(int n, int ell, double rho, double scale) {
  check_dim(n);
  if (2 * ell <= n)
    throw std::invalid_argument("h2_bound_poincare: out of the theorem's range (needs 2 ell > n)");
  if (rho <= 0.0) throw std::invalid_argument("h2_bound_poincare: rho must be > 0");
  return scale / rho;
}

// Bound on the zero-mean Poincare constant K_P of a star-shaped piece:
//   scale * (R/rho) * [1 + (log |Omega|/|B|)^{n/(2(n-1))} (|Omega|/|B|)^{(n-2)/(2(n-1))}].
inline double poincare_constant_KP(int n, const DomainStats& stats, double scale) {
  check_dim(n);
  if (stats.ratio_vol < 1.0)
    throw std::invalid_argument("poincare_constant_KP: degenerate geometry, |Omega|/|B| < 1");
  double ratio = stats.ratio_vol;
  double term = std::pow(std::log(ratio), n / (2.0 * (n - 1.0))) *
                std::pow(ratio, (n - 2.0) / (2.0 * (n - 1.0)));
  return scale * stats.ratio_diam * (1.0 + term);
}

// Chain-of-domains bound: without boundary conditions
//   2 C_T                                               for ell = 1,
//   2 C_T sqrt(1 + 32 C_S^2 (C_T C_P D_T / d_T + 1)^4)  for ell >= 2;
// with boundary conditions
//   4 C_T sqrt(2 + C_S^2 dim_const^2 (D_T/d_T)^2 C_T^2),
// the latter defined for ell <= n - 1 only.
inline double chain_bound(bool bc, int ell, int n, double c_t, double c_p, double c_s, double d_big,
                          double d_small, double dim_const) {
  check_dim(n);
  if (ell < 1) throw std::invalid_argument("chain_bound: ell >= 1 required");
  if (c_t <= 0.0 || d_big <= 0.0 || d_small <= 0.0 || c_p < 0.0 || c_s < 0.0)
    throw std::invalid_argument("chain_bound: nonpositive geometry constant");
  if (bc && ell == n)
    throw std::invalid_argument("chain_bound: ell = n with boundary conditions is out of scope");
  if (bc) {
    double t = c_s * dim_const * (d_big / d_small) * c_t;
    return 4.0 * c_t * std::sqrt(2.0 + t * t);
  }
  if (ell == 1) return 2.0 * c_t;
  double inner = c_t * c_p * d_big / d_small + 1.0;
  return 2.0 * c_t * std::sqrt(1.0 + 32.0 * c_s * c_s * inner * inner * inner * inner);
}

// ---------------------------------------------------------------------------
// empirical operator ratios

struct EmpiricalConfig {
  int quad_level = 3;          // norm quadrature level over the domain
  int z_grid = 32;             // bogovskii z resolution
  int t_quad_order = 12;       // bogovskii ray order
  double fd_step_rel = 0.004;  // bogovskii gradient step as a fraction of R
  double support_shrink = 0.9; // mollifier support radius / inscribed ball radius
  int moment_degree = 12;
};

struct BoundReport {
  OperatorKind kind = OperatorKind::poincare;
  int n = 0;
  int ell = 0;
  DomainStats stats;
  double kappa_value = 0.0;
  double scale = 1.0;
  double bound_value = 0.0;       // scale * (R/rho) * kappa
  double empirical_ratio = 0.0;   // max over the ensemble of |op u|_H1 / ||u||_L2
  int ensemble = 0;
  int degree = 0;
  std::uint64_t seed = 0;
  std::vector<double> samples;
};

namespace detail {

inline Mollifier domain_mollifier(const StarDomain& dom, const EmpiricalConfig& cfg) {
  const BallShape& b = dom.inscribed_ball();
  return build_bump(dom.dim(), b.center, cfg.support_shrink * b.radius, cfg.moment_degree);
}

// |B u|_H1 over the domain by central differences of the components at the
// quadrature nodes
inline double bogovskii_h1_fd(const BogovskiiConfig& bcfg,
                              const std::function<FormValue(const Point&)>& u,
                              const QuadratureNodes& nodes, double h) {
  const int n = bcfg.mollifier.dim();
  double acc = 0.0;
  for (const Point& x : nodes.points) {
    for (int j = 0; j < n; ++j) {
      Point xp = x, xm = x;
      xp[static_cast<std::size_t>(j)] += h;
      xm[static_cast<std::size_t>(j)] -= h;
      FormValue fp = apply_bogovskii(bcfg, u, xp);
      FormValue fm = apply_bogovskii(bcfg, u, xm);
      for (int c = 0; c < fp.components(); ++c) {
        double d = (fp[c] - fm[c]) / (2.0 * h);
        acc += d * d;
      }
    }
  }
  return std::sqrt(acc * nodes.weight);
}

}  // namespace detail

// |op u|_H1 / ||u||_L2 for one closed polynomial form (symbolic derivatives on
// the Poincare moment path, finite differences plus quadrature on the
// Bogovskii path).
inline double empirical_ratio_single(OperatorKind kind, const StarDomain& dom,
                                     const EmpiricalConfig& cfg, const Mollifier& mol,
                                     const PolyForm& u) {
  const int ell = u.degree();
  double denom = l2_norm(u, dom, cfg.quad_level);
  if (denom == 0.0) return 0.0;
  if (kind == OperatorKind::poincare) {
    PoincareConfig pcfg(mol, ell);
    PolyForm v = apply_poincare_poly(pcfg, u);
    return sobolev_seminorm(v, 1, dom, cfg.quad_level) / denom;
  }
  BogovskiiConfig bcfg(mol, dom, ell);
  bcfg.z_grid = cfg.z_grid;
  bcfg.t_quad_order = cfg.t_quad_order;
  detail::FlatForm flat(u);
  const int un = u.dim(), ul = u.degree();
  auto masked = [&dom, flat, un, ul](const Point& y) {
    FormValue v(un, ul);
    if (dom.contains(y))
      for (int c = 0; c < v.components(); ++c) v[c] = flat.comp[static_cast<std::size_t>(c)].evaluate(y);
    return v;
  };
  QuadratureNodes nodes = quadrature_nodes(dom, cfg.quad_level);
  double h = cfg.fd_step_rel * dom.diameter();
  return detail::bogovskii_h1_fd(bcfg, masked, nodes, h) / denom;
}

// Draw an ensemble of random closed forms, apply the operator, report the
// maximal ratio together with the evaluated bound formula.
inline BoundReport estimate_empirical_ratio(OperatorKind kind, const StarDomain& dom,
                                            const EmpiricalConfig& cfg, int ell, int ensemble,
                                            int degree, std::uint64_t seed, double scale = 1.0) {
  if (ensemble < 1) throw std::invalid_argument("estimate_empirical_ratio: ensemble >= 1");
  BoundReport rep;
  rep.kind = kind;
  rep.n = dom.dim();
  rep.ell = ell;
  rep.stats = domain_stats(dom);
  rep.kappa_value = kappa(kind, rep.n, ell, rep.stats);
  rep.scale = scale;
  rep.bound_value = scale * rep.stats.ratio_diam * rep.kappa_value;
  rep.ensemble = ensemble;
  rep.degree = degree;
  rep.seed = seed;
  Mollifier mol = detail::domain_mollifier(dom, cfg);
  for (int i = 0; i < ensemble; ++i) {
    PolyForm u = random_closed_form(rep.n, ell, degree, Rng::derive(seed, static_cast<std::uint64_t>(i)));
    double r = empirical_ratio_single(kind, dom, cfg, mol, u);
    rep.samples.push_back(r);
    rep.empirical_ratio = std::max(rep.empirical_ratio, r);
  }
  return rep;
}

}  // namespace starforms

#endif
