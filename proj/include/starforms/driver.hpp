#ifndef STARFORMS_DRIVER_HPP
#define STARFORMS_DRIVER_HPP

#include <atomic>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "starforms/chain.hpp"
#include "starforms/csv.hpp"

namespace starforms {

using nlohmann::json;

// configuration problems map to exit code 2
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cfgutil {

inline const json& require(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw ConfigError("config: missing required key '" + key + "'");
  return cfg.at(key);
}

inline std::uint64_t seed_of(const json& cfg) {
  const json& s = require(cfg, "seed");
  if (!s.is_number_unsigned() && !s.is_number_integer())
    throw ConfigError("config: 'seed' must be an integer");
  return s.get<std::uint64_t>();
}

inline int dim_of(const json& cfg, int dflt = 2) {
  int n = cfg.value("n", dflt);
  if (n < 2 || n > kMaxDim)
    throw ConfigError("config: unsupported dimension n = " + std::to_string(n) +
                      " (supported: 2.." + std::to_string(kMaxDim) + ")");
  return n;
}

inline Point point_of(const json& arr, int n) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != n)
    throw ConfigError("config: expected an array of " + std::to_string(n) + " coordinates");
  Point p{};
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = arr.at(static_cast<std::size_t>(i)).get<double>();
  return p;
}

inline StarDomain domain_of(const json& cfg, int n) {
  const json& d = require(cfg, "domain");
  std::string shape = require(d, "shape").get<std::string>();
  const json& ins = require(d, "inscribed");
  BallShape ball{point_of(require(ins, "center"), n), require(ins, "radius").get<double>()};
  if (shape == "ball")
    return StarDomain(n, BallShape{point_of(require(d, "center"), n), require(d, "radius").get<double>()},
                      ball);
  if (shape == "ellipsoid")
    return StarDomain(
        n, EllipsoidShape{point_of(require(d, "center"), n), point_of(require(d, "semi_axes"), n)},
        ball);
  if (shape == "cigar")
    return StarDomain(n,
                      CigarShape{point_of(require(d, "a"), n), point_of(require(d, "b"), n),
                                 require(d, "radius").get<double>()},
                      ball);
  if (shape == "radial_star") {
    RadialStar2DShape s;
    s.center = point_of(require(d, "center"), n);
    s.a0 = require(d, "a0").get<double>();
    if (d.contains("cos")) s.cos_coef = d.at("cos").get<std::vector<double>>();
    if (d.contains("sin")) s.sin_coef = d.at("sin").get<std::vector<double>>();
    return StarDomain(n, s, ball);
  }
  throw ConfigError("config: unknown shape '" + shape + "'");
}

inline int workers_from_env() {
  const char* s = std::getenv("STARFORMS_WORKERS");
  if (!s) return 1;
  int w = std::atoi(s);
  return w < 1 ? 1 : w;
}

}  // namespace cfgutil

// Run `count` independent work items on the worker pool and collect results in
// item order, so the output is independent of the worker count.
template <typename T, typename F>
std::vector<T> ordered_parallel_map(int count, F&& fn) {
  int workers = std::min(cfgutil::workers_from_env(), std::max(1, count));
  std::vector<T> out(static_cast<std::size_t>(count));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        out[static_cast<std::size_t>(i)] = fn(i);
      }
    });
  for (auto& t : pool) t.join();
  return out;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyLine {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOutcome {
  std::vector<VerifyLine> lines;
  bool all_pass = true;

  std::string report() const {
    std::string out = "invariant,residual,tolerance,status\n";
    for (const VerifyLine& l : lines) {
      out += l.name + "," + format_number(l.residual) + "," + format_number(l.tolerance) + "," +
             (l.pass ? "PASS" : "FAIL") + "\n";
    }
    return out;
  }
};

inline VerifyOutcome run_verify(const json& cfg) {
  std::uint64_t seed = cfgutil::seed_of(cfg);
  int nmax = cfgutil::dim_of(cfg, 3);
  json tols = cfg.value("tolerances", json::object());
  auto tol = [&tols](const std::string& name, double dflt) { return tols.value(name, dflt); };

  VerifyOutcome out;
  auto record = [&out](const std::string& name, double residual, double tolerance) {
    bool ok = residual <= tolerance;
    out.lines.push_back({name, residual, tolerance, ok});
    out.all_pass = out.all_pass && ok;
  };

  // --- exterior algebra ------------------------------------------------------
  {
    Rng rng(Rng::derive(seed, 1));
    double worst = 0.0;
    for (int n = 2; n <= nmax; ++n)
      for (int rep = 0; rep < 50; ++rep) {
        int l = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n + 1));
        int k = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n - l + 1));
        FormValue a(n, l), b(n, k);
        for (int c = 0; c < a.components(); ++c) a[c] = rng.uniform(-1.0, 1.0);
        for (int c = 0; c < b.components(); ++c) b[c] = rng.uniform(-1.0, 1.0);
        FormValue ab = wedge(a, b);
        double sgn = (l * k % 2 == 0) ? 1.0 : -1.0;
        FormValue anti = ab - sgn * wedge(b, a);
        worst = std::max(worst, anti.max_abs());
        FormValue ss = hodge_star(hodge_star(a));
        double s2 = ((l * (n - l)) % 2 == 0) ? 1.0 : -1.0;
        FormValue dd = ss - s2 * a;
        worst = std::max(worst, dd.max_abs());
        if (l >= 1 && l + k <= n) {
          Point z{};
          for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
          FormValue lhs = contract(z, ab);
          FormValue rhs = wedge(contract(z, a), b);
          if (k >= 1) rhs += ((l % 2 == 0) ? 1.0 : -1.0) * wedge(a, contract(z, b));
          FormValue res = lhs - rhs;
          worst = std::max(worst, res.max_abs());
        }
      }
    record("algebra.identities", worst, tol("algebra", 1e-12));

    double dd_worst = 0.0;
    for (int n = 2; n <= nmax; ++n)
      for (int l = 0; l + 2 <= n; ++l) {
        Rng r2(Rng::derive(seed, 100 + static_cast<std::uint64_t>(10 * n + l)));
        PolyForm u = random_form(n, l, 3, r2);
        dd_worst = std::max(dd_worst, exterior_derivative(exterior_derivative(u)).max_abs_coefficient());
      }
    record("algebra.d_squared", dd_worst, tol("algebra", 1e-12));
  }

  // --- homotopy (Poincare) ---------------------------------------------------
  {
    int ensemble = cfg.value("ensemble", 10);
    double worst_closed = 0.0, worst_general = 0.0;
    for (int n = 2; n <= std::min(nmax, 3); ++n) {
      Mollifier mol = build_bump(n, Point{}, 0.4, 12);
      for (int l = 1; l <= n; ++l) {
        PoincareConfig pcfg(mol, l);
        for (int rep = 0; rep < ensemble; ++rep) {
          PolyForm u = random_closed_form(n, l, 3, Rng::derive(seed, 1000 + static_cast<std::uint64_t>(100 * n + 10 * l + rep)));
          PolyForm resid = exterior_derivative(apply_poincare_poly(pcfg, u)) - u;
          worst_closed = std::max(worst_closed, resid.max_abs_coefficient());
        }
        if (l < n) {
          Rng r3(Rng::derive(seed, 5000 + static_cast<std::uint64_t>(10 * n + l)));
          PolyForm u = random_form(n, l, 3, r3);
          PoincareConfig up(mol, l + 1);
          PolyForm resid = exterior_derivative(apply_poincare_poly(pcfg, u)) +
                           apply_poincare_poly(up, exterior_derivative(u)) - u;
          worst_general = std::max(worst_general, resid.max_abs_coefficient());
        }
      }
    }
    record("homotopy.null_homotopy_closed", worst_closed, tol("homotopy", 1e-8));
    record("homotopy.general_identity", worst_general, tol("homotopy", 1e-8));
  }

  // --- locality and trace (Bogovskii) ---------------------------------------
  {
    StarDomain disk = StarDomain::ball(2, Point{}, 1.0, 0.45);
    Mollifier mol = build_bump(2, Point{}, 0.405, 4);
    BumpWindow win;
    win.n = 2;
    win.center = make_point({0.3, 0.25});
    win.semi_axes = make_point({0.2, 0.2});
    PolyForm p(2, 0);
    p[0] = MultiPoly::constant(2, 1.0) + MultiPoly::variable(2, 1);
    BumpForm w(win, p);
    auto u = [&w](const Point& y) { return w.d_value(y); };
    BogovskiiConfig bcfg(mol, disk, 1);
    bcfg.z_grid = cfg.value("z_grid", 32);
    bcfg.t_quad_order = cfg.value("t_quad_order", 12);
    Rng rng(Rng::derive(seed, 7));
    double worst_loc = 0.0;
    int found = 0;
    while (found < 50) {
      Point x = make_point({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
      if (!disk.contains(x)) continue;
      // outside the convex hull of the ball and the blob support
      if (x[0] > -0.1 && x[1] > -0.1) continue;
      if (dist(x, Point{}, 2) < 0.5) continue;
      ++found;
      worst_loc = std::max(worst_loc, apply_bogovskii(bcfg, u, x).max_abs());
    }
    record("bogovskii.locality", worst_loc, tol("locality", 1e-9));

    // trace pairing of B u against random psi; the comparison tolerance is
    // assembled from the measured evaluation error of B u (two-level grid
    // difference) amplified by the finite-difference step
    double h = 0.02;
    BogovskiiConfig fine = bcfg;
    fine.z_grid = 2 * bcfg.z_grid;
    fine.t_quad_order = 2 * bcfg.t_quad_order;
    double eps_b = 1e-12;
    for (const Point& probe : {make_point({0.25, 0.2}), make_point({0.05, 0.35}),
                               make_point({0.4, 0.05}), make_point({0.15, 0.05})}) {
      FormValue d = apply_bogovskii(bcfg, u, probe) - apply_bogovskii(fine, u, probe);
      eps_b = std::max(eps_b, d.max_abs());
    }
    FormField bu;
    bu.n = 2;
    bu.degree = 0;
    bu.value = [&bcfg, &u](const Point& x) { return apply_bogovskii(bcfg, u, x); };
    bu.d_value = [&bcfg, &u, h](const Point& x) { return bogovskii_d_fd(bcfg, u, x, h); };
    FieldSamples samples = sample_field(bu, disk, 2);
    double worst_tr = 0.0;  // pairing normalized by its combined tolerance
    Rng rpsi(Rng::derive(seed, 8));
    for (int r = 0; r < 5; ++r) {
      PolyForm psi = random_form(2, 1, 2, rpsi);
      PolyForm dpsi = exterior_derivative(psi);
      double psi_max = 0.0, dpsi_max = 0.0;
      for (const Point& x : samples.nodes.points) {
        psi_max = std::max(psi_max, evaluate(psi, x).max_abs());
        dpsi_max = std::max(dpsi_max, evaluate(dpsi, x).max_abs());
      }
      double vol = samples.nodes.sum_weights();
      double combined = vol * (psi_max * 1.5 * eps_b / h + dpsi_max * eps_b) + 1e-9;
      worst_tr = std::max(worst_tr, std::abs(trace_pairing(samples, psi)) / combined);
    }
    record("bogovskii.trace_pairing_vs_combined_tol", worst_tr, tol("trace", 1.0));
  }

  // --- gluing ----------------------------------------------------------------
  {
    ChainDecomposition chain = build_chain(2, 2, 0.9, 0.45, 0.3, Rng::derive(seed, 9));
    double worst_dv = 0.0, worst_jump = 0.0;
    for (int l = 1; l <= 2; ++l) {
      PolyForm u = random_closed_form(2, l, 3, Rng::derive(seed, 10 + static_cast<std::uint64_t>(l)));
      GlueNoBcResult res = glue_no_bc(chain, u, cfg.value("quad_level", 3));
      worst_dv = std::max(worst_dv, res.report.max_dv_residual);
      worst_jump = std::max(worst_jump, res.report.max_interface_jump);
    }
    record("chain.glue_dv_residual", worst_dv, tol("glue_dv", 1e-7));
    record("chain.glue_interface_jump", worst_jump, tol("glue_jump", 1e-8));
  }

  return out;
}

// ---------------------------------------------------------------------------
// sweep: cigar family with a fixed inscribed ball, bound shape vs empirical

inline CsvTable run_sweep(const json& cfg) {
  std::uint64_t seed = cfgutil::seed_of(cfg);
  int n = cfgutil::dim_of(cfg, 2);
  double r = cfg.value("tube_radius", 0.45);
  std::vector<double> ratios = cfg.value("ratios", std::vector<double>{1.0, 2.0, 4.0, 8.0});
  std::vector<int> ells = cfg.value("ells", std::vector<int>{1, 2});
  std::vector<std::string> kinds = cfg.value("kinds", std::vector<std::string>{"poincare", "bogovskii"});
  int ensemble = cfg.value("ensemble", 8);
  int degree = cfg.value("degree", 3);
  double safety = cfg.value("safety", 2.0);
  EmpiricalConfig ecfg;
  ecfg.quad_level = cfg.value("quad_level", 3);
  ecfg.z_grid = cfg.value("z_grid", 28);
  ecfg.t_quad_order = cfg.value("t_quad_order", 12);

  for (double ratio : ratios)
    if (ratio < 1.0) throw ConfigError("sweep: R/rho ratios must be >= 1");

  struct Item {
    OperatorKind kind;
    int ell;
  };
  std::vector<Item> items;
  for (const std::string& ks : kinds) {
    OperatorKind kind;
    if (ks == "poincare")
      kind = OperatorKind::poincare;
    else if (ks == "bogovskii")
      kind = OperatorKind::bogovskii;
    else
      throw ConfigError("sweep: unknown operator kind '" + ks + "'");
    for (int ell : ells) {
      if (ell < 1 || ell > n) throw ConfigError("sweep: ell out of range");
      items.push_back({kind, ell});
    }
  }

  auto family_domain = [&](double ratio) {
    double half = r * (ratio - 1.0);  // R/rho = (L + 2r)/(2r), L = 2 half
    return StarDomain::stadium(n, Point{}, half, r, r);
  };

  struct GroupResult {
    std::vector<BoundReport> reports;
    double scale = 1.0;
    bool trend_ok = true;
  };
  std::vector<GroupResult> groups = ordered_parallel_map<GroupResult>(
      static_cast<int>(items.size()), [&](int idx) {
        const Item& it = items[static_cast<std::size_t>(idx)];
        GroupResult g;
        std::uint64_t item_seed = Rng::derive(seed, static_cast<std::uint64_t>(100 + it.ell) *
                                                        (it.kind == OperatorKind::poincare ? 1 : 2));
        for (double ratio : ratios) {
          StarDomain dom = family_domain(ratio);
          g.reports.push_back(estimate_empirical_ratio(it.kind, dom, ecfg, it.ell, ensemble, degree,
                                                       item_seed));
        }
        // one-point calibration at the most symmetric member (times the safety
        // factor); kappa clamped below by one where its log factor vanishes
        const BoundReport& first = g.reports.front();
        g.scale = safety * first.empirical_ratio /
                  (first.stats.ratio_diam * std::max(first.kappa_value, 1.0));
        for (BoundReport& rep : g.reports)
          rep.bound_value = g.scale * rep.stats.ratio_diam * rep.kappa_value;
        for (std::size_t i = 0; i + 1 < g.reports.size(); ++i)
          if (g.reports[i + 1].empirical_ratio < g.reports[i].empirical_ratio * (1.0 - 1e-9))
            g.trend_ok = false;
        return g;
      });

  CsvTable table;
  table.header = {"n",     "ell",  "kind",      "R",    "rho",      "vol_ratio", "kappa",
                  "bound", "empirical", "seed", "ensemble", "trend_ok"};
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (const BoundReport& rep : groups[gi].reports) {
      table.add_row({std::to_string(rep.n), std::to_string(rep.ell), kind_name(rep.kind),
                     format_number(rep.stats.R), format_number(rep.stats.rho),
                     format_number(rep.stats.ratio_vol), format_number(rep.kappa_value),
                     format_number(rep.bound_value), format_number(rep.empirical_ratio),
                     std::to_string(rep.seed), std::to_string(rep.ensemble),
                     groups[gi].trend_ok ? "1" : "0"});
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// chain experiments

// max over an ensemble of zero-mean polynomials of ||f||_L2 / (diam |f|_H1);
// the measured counterpart of the zero-mean Poincare constant
inline double measure_zero_mean_ratio(const StarDomain& dom, int ensemble, int degree,
                                      std::uint64_t seed, int quad_level) {
  QuadratureNodes q = quadrature_nodes(dom, quad_level);
  double best = 0.0;
  for (int i = 0; i < ensemble; ++i) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(i)));
    PolyForm f = random_form(dom.dim(), 0, degree, rng);
    double mean = 0.0;
    for (const Point& x : q.points) mean += f[0].evaluate(x);
    mean /= static_cast<double>(q.points.size());
    PolyForm g = f;
    g[0] -= MultiPoly::constant(dom.dim(), mean);
    double l2 = sobolev_seminorm(g, 0, dom, quad_level);
    double h1 = sobolev_seminorm(g, 1, dom, quad_level);
    if (h1 > 0.0) best = std::max(best, l2 / (dom.diameter() * h1));
  }
  return best;
}

// same over bump-localized scalar fields vanishing at the boundary; the
// measured counterpart of the H1_0 Poincare constant C(n)
inline double measure_h10_ratio(const StarDomain& dom, int ensemble, int degree, std::uint64_t seed,
                                int quad_level) {
  QuadratureNodes q = quadrature_nodes(dom, quad_level);
  const BallShape& b = dom.inscribed_ball();
  BumpWindow win;
  win.n = dom.dim();
  win.center = b.center;
  for (int i = 0; i < dom.dim(); ++i) win.semi_axes[static_cast<std::size_t>(i)] = 0.95 * b.radius;
  double best = 0.0;
  for (int i = 0; i < ensemble; ++i) {
    Rng rng(Rng::derive(seed, 77 + static_cast<std::uint64_t>(i)));
    PolyForm p = random_form(dom.dim(), 0, degree, rng);
    BumpForm w(win, p);
    double acc0 = 0.0, acc1 = 0.0;
    for (const Point& x : q.points) {
      double v = w.value(x)[0];
      acc0 += v * v;
      FormValue g = w.d_value(x);
      for (int c = 0; c < g.components(); ++c) acc1 += g[c] * g[c];
    }
    if (acc1 > 0.0) best = std::max(best, std::sqrt(acc0 / acc1) / dom.diameter());
  }
  return best;
}

inline CsvTable run_chain(const json& cfg) {
  std::uint64_t seed = cfgutil::seed_of(cfg);
  int n = cfgutil::dim_of(cfg, 2);
  if (n != 2) throw ConfigError("chain: experiments are defined for n = 2");
  std::vector<int> link_counts = cfg.value("links", std::vector<int>{2, 4, 8});
  std::vector<int> ells = cfg.value("ells", std::vector<int>{1, 2});
  std::string mode = cfg.value("mode", "no-bc");
  if (mode != "no-bc" && mode != "bc" && mode != "both")
    throw ConfigError("chain: mode must be one of no-bc|bc|both");
  double half = cfg.value("half_length", 0.9);
  double tube = cfg.value("tube_radius", 0.35);
  double overlap = cfg.value("overlap_fraction", 0.25);
  int degree = cfg.value("degree", 3);
  int quad_level = cfg.value("quad_level", 3);
  double safety = cfg.value("safety", 2.0);
  int ensemble = cfg.value("ensemble", 8);

  // one-point calibration of the per-piece operator constant on the unit disk
  StarDomain ref = StarDomain::ball(2, Point{}, 1.0, 0.45);
  EmpiricalConfig ecfg;
  ecfg.quad_level = quad_level;
  DomainStats ref_stats = domain_stats(ref);
  std::map<int, double> scale_p;
  for (int ell : ells) {
    BoundReport rep = estimate_empirical_ratio(OperatorKind::poincare, ref, ecfg, ell, ensemble,
                                               degree, Rng::derive(seed, 40 + static_cast<std::uint64_t>(ell)));
    scale_p[ell] = safety * rep.empirical_ratio /
                   (ref_stats.ratio_diam * std::max(rep.kappa_value, 1.0));
  }

  CsvTable table;
  table.header = {"N",   "ell",        "mode", "max_dv_residual", "max_interface_jump", "v_h1",
                  "chain_bound", "C_T", "C_S",  "C_P",             "seed"};

  auto piece_constants = [&](const ChainDecomposition& chain, int ell) {
    double c_t = 0.0, c_p = 0.0;
    std::vector<const StarDomain*> pieces;
    for (const StarDomain& d : chain.links) pieces.push_back(&d);
    for (const StarDomain& d : chain.overlaps) pieces.push_back(&d);
    for (std::size_t t = 0; t < pieces.size(); ++t) {
      DomainStats s = domain_stats(*pieces[t]);
      c_t = std::max(c_t, scale_p.at(ell) * s.ratio_diam *
                              std::max(kappa_poincare(2, ell, s), 1.0));
      c_p = std::max(c_p, measure_zero_mean_ratio(*pieces[t], 6, 3,
                                                  Rng::derive(seed, 60 + static_cast<std::uint64_t>(t)),
                                                  quad_level));
    }
    return std::make_pair(c_t, c_p);
  };

  if (mode == "no-bc" || mode == "both") {
    for (int N : link_counts)
      for (int ell : ells) {
        ChainDecomposition chain = build_chain(2, N, half, tube, overlap, Rng::derive(seed, 3));
        PolyForm u = random_closed_form(2, ell, degree,
                                        Rng::derive(seed, 500 + static_cast<std::uint64_t>(ell)));
        GlueNoBcResult res = glue_no_bc(chain, u, quad_level);
        auto [c_t, c_p] = piece_constants(chain, ell);
        double d_big = 0.0, d_small = std::numeric_limits<double>::infinity();
        for (const StarDomain& d : chain.links) {
          d_big = std::max(d_big, d.diameter());
          d_small = std::min(d_small, d.diameter());
        }
        for (const StarDomain& d : chain.overlaps) {
          d_big = std::max(d_big, d.diameter());
          d_small = std::min(d_small, d.diameter());
        }
        double bound = chain_bound(false, ell, 2, c_t, c_p, chain.measured_c_s, d_big, d_small, 1.0);
        table.add_row({std::to_string(N), std::to_string(ell), "no-bc",
                       format_number(res.report.max_dv_residual),
                       format_number(res.report.max_interface_jump), format_number(res.report.v_h1),
                       format_number(bound), format_number(c_t),
                       format_number(chain.measured_c_s), format_number(c_p),
                       std::to_string(seed)});
      }
  }

  if (mode == "bc" || mode == "both") {
    for (int N : link_counts) {
      ChainDecomposition chain = build_chain(2, N, half, 0.45, 0.3, Rng::derive(seed, 4));
      if (N != 2) continue;  // bc experiments ship at N = 2
      for (int ell : ells) {
        if (ell >= 2) continue;  // n = 2: only ell = 1 is inside the theorem's range
        BumpWindow win;
        win.n = 2;
        win.center = chain.total.inscribed_ball().center;
        Point lo{}, hi{};
        chain.total.bounding_box(lo, hi);
        win.semi_axes = make_point({0.45 * (hi[0] - lo[0]), 0.42});
        PolyForm p(2, 0);
        p[0] = MultiPoly::constant(2, 1.0) + 0.4 * MultiPoly::variable(2, 0);
        BumpForm wg(win, p);
        FormField u = wg.derivative_field();
        GlueBc glue(chain, u, cfg.value("w_grid", 40), cfg.value("z_grid", 24),
                    cfg.value("t_quad_order", 16));

        Rng rs(Rng::derive(seed, 900));
        Point blo{}, bhi{};
        chain.total.bounding_box(blo, bhi);
        double umax = 0.0, worst = 0.0;
        std::vector<Point> samples;
        while (samples.size() < 8) {
          Point x = make_point({rs.uniform(blo[0], bhi[0]), rs.uniform(blo[1], bhi[1])});
          if (chain.total.level(x) < 0.85) samples.push_back(x);
        }
        for (const Point& x : samples) umax = std::max(umax, u.value(x).max_abs());
        for (const Point& x : samples) {
          FormValue diff = glue.d_value(x, 0.015) - u.value(x);
          worst = std::max(worst, diff.max_abs());
        }
        double resid = (umax > 0.0) ? worst / umax : 0.0;

        // coarse H1 of v by central differences at level-2 nodes
        QuadratureNodes q = quadrature_nodes(chain.total, 2);
        double acc = 0.0;
        double hfd = 0.015;
        for (const Point& x : q.points) {
          for (int j = 0; j < 2; ++j) {
            Point xp = x, xm = x;
            xp[static_cast<std::size_t>(j)] += hfd;
            xm[static_cast<std::size_t>(j)] -= hfd;
            FormValue fp = glue.value(xp), fm = glue.value(xm);
            for (int c = 0; c < fp.components(); ++c) {
              double d = (fp[c] - fm[c]) / (2.0 * hfd);
              acc += d * d;
            }
          }
        }
        double v_h1 = std::sqrt(acc * q.weight);

        auto [c_t, c_p] = piece_constants(chain, ell);
        double dim_const = 0.0;
        for (const StarDomain& d : chain.links)
          dim_const = std::max(dim_const, measure_h10_ratio(d, 4, 2, Rng::derive(seed, 70), quad_level));
        double d_big = 0.0, d_small = std::numeric_limits<double>::infinity();
        for (const StarDomain& d : chain.links) {
          d_big = std::max(d_big, d.diameter());
          d_small = std::min(d_small, d.diameter());
        }
        for (const StarDomain& d : chain.overlaps) {
          d_big = std::max(d_big, d.diameter());
          d_small = std::min(d_small, d.diameter());
        }
        double bound = chain_bound(true, ell, 2, c_t, c_p, chain.measured_c_s, d_big, d_small, dim_const);
        table.add_row({std::to_string(N), std::to_string(ell), "bc", format_number(resid),
                       format_number(0.0), format_number(v_h1), format_number(bound),
                       format_number(c_t), format_number(chain.measured_c_s), format_number(c_p),
                       std::to_string(seed)});
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// moments

inline CsvTable run_moments(const json& cfg) {
  int n = cfgutil::dim_of(cfg, 2);
  Point center = cfg.contains("center") ? cfgutil::point_of(cfg.at("center"), n) : Point{};
  double radius = cfg.value("radius", 0.405);
  int degree = cfg.value("degree", 8);
  Mollifier mol = build_bump(n, center, radius, degree);
  CsvTable table;
  for (int i = 1; i <= n; ++i) table.header.push_back("alpha_" + std::to_string(i));
  table.header.push_back("value");
  for (const auto& [alpha, value] : mol.moment_table()) {
    std::vector<std::string> row;
    for (int i = 0; i < n; ++i) row.push_back(std::to_string(alpha[static_cast<std::size_t>(i)]));
    row.push_back(format_number(value));
    table.add_row(row);
  }
  return table;
}

}  // namespace starforms

#endif
