#include <catch2/catch_amalgamated.hpp>

#include "starforms/bogovskii.hpp"

using namespace starforms;

namespace {

// Test-only oracle: direct quadrature of the (s, y) rewrite
//   B_l u(x) = int_0^1 (1-s)^(n-l) s^-n int theta(y + (x-y)/s) ((x-y)/s) -| u(y) dy ds,
// independent of the ray/exit-time path it checks. For each s node the inner
// integral runs over the exact y-support ball (the preimage of the mollifier
// support), resolved by its own scaled grid.
FormValue bogovskii_sy_oracle(const Mollifier& mol, const StarDomain& dom, int ell,
                              const std::function<FormValue(const Point&)>& u, const Point& x,
                              int s_order, int y_grid) {
  const int n = mol.dim();
  const GaussRule& rule = gauss_legendre(s_order);
  FormValue out(n, ell - 1);
  for (std::size_t is = 0; is < rule.nodes.size(); ++is) {
    double s = 0.5 * (rule.nodes[is] + 1.0);
    double w = 0.5 * rule.weights[is] * std::pow(1.0 - s, n - ell) / std::pow(s, n);
    // y + (x - y)/s in supp theta  <=>  y in ball((x - s c0)/(1-s), s r/(1-s));
    // clip the box to the domain so the grid resolves the integrand
    Point yc{}, dlo{}, dhi{};
    dom.bounding_box(dlo, dhi);
    for (int i = 0; i < n; ++i)
      yc[static_cast<std::size_t>(i)] = (x[static_cast<std::size_t>(i)] -
                                         s * mol.center()[static_cast<std::size_t>(i)]) /
                                        (1.0 - s);
    double yr = s * mol.radius() / (1.0 - s);
    double lo0 = std::max(yc[0] - yr, dlo[0]), hi0 = std::min(yc[0] + yr, dhi[0]);
    double lo1 = std::max(yc[1] - yr, dlo[1]), hi1 = std::min(yc[1] + yr, dhi[1]);
    if (lo0 >= hi0 || lo1 >= hi1) continue;
    double h0 = (hi0 - lo0) / y_grid, h1 = (hi1 - lo1) / y_grid;
    FormValue acc(n, ell - 1);
    for (int iy = 0; iy < y_grid; ++iy)
      for (int jy = 0; jy < y_grid; ++jy) {
        Point y{};
        y[0] = lo0 + (iy + 0.5) * h0;
        y[1] = lo1 + (jy + 0.5) * h1;
        if (!dom.contains(y)) continue;
        Point arg{}, vec{};
        for (int i = 0; i < n; ++i) {
          double a = x[static_cast<std::size_t>(i)], b = y[static_cast<std::size_t>(i)];
          vec[static_cast<std::size_t>(i)] = (a - b) / s;
          arg[static_cast<std::size_t>(i)] = b + (a - b) / s;
        }
        double th = mol.eval(arg);
        if (th == 0.0) continue;
        FormValue c = contract(vec, u(y));
        for (int cc = 0; cc < acc.components(); ++cc) acc[cc] += th * c[cc];
      }
    for (int cc = 0; cc < out.components(); ++cc) out[cc] += w * h0 * h1 * acc[cc];
  }
  return out;
}

double q_sy_oracle(const Mollifier& mol, const StarDomain& dom, int ell,
                   const std::function<double(const Point&)>& f, int m, const Point& x, int s_order,
                   int y_grid) {
  const int n = mol.dim();
  const GaussRule& rule = gauss_legendre(s_order);
  double out = 0.0;
  for (std::size_t is = 0; is < rule.nodes.size(); ++is) {
    double s = 0.5 * (rule.nodes[is] + 1.0);
    double w = 0.5 * rule.weights[is] * std::pow(1.0 - s, n - ell) / std::pow(s, n);
    Point yc{}, dlo{}, dhi{};
    dom.bounding_box(dlo, dhi);
    for (int i = 0; i < n; ++i)
      yc[static_cast<std::size_t>(i)] = (x[static_cast<std::size_t>(i)] -
                                         s * mol.center()[static_cast<std::size_t>(i)]) /
                                        (1.0 - s);
    double yr = s * mol.radius() / (1.0 - s);
    double lo0 = std::max(yc[0] - yr, dlo[0]), hi0 = std::min(yc[0] + yr, dhi[0]);
    double lo1 = std::max(yc[1] - yr, dlo[1]), hi1 = std::min(yc[1] + yr, dhi[1]);
    if (lo0 >= hi0 || lo1 >= hi1) continue;
    double h0 = (hi0 - lo0) / y_grid, h1 = (hi1 - lo1) / y_grid;
    double acc = 0.0;
    for (int iy = 0; iy < y_grid; ++iy)
      for (int jy = 0; jy < y_grid; ++jy) {
        Point y{};
        y[0] = lo0 + (iy + 0.5) * h0;
        y[1] = lo1 + (jy + 0.5) * h1;
        if (!dom.contains(y)) continue;
        Point arg{};
        for (int i = 0; i < n; ++i)
          arg[static_cast<std::size_t>(i)] =
              y[static_cast<std::size_t>(i)] +
              (x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]) / s;
        double th = mol.eval(arg);
        if (th == 0.0) continue;
        acc += th * (x[static_cast<std::size_t>(m)] - y[static_cast<std::size_t>(m)]) / s * f(y);
      }
    out += w * h0 * h1 * acc;
  }
  return out;
}

}  // namespace

TEST_CASE("one-dimensional antiderivative oracle") {
  // Omega = (0, 1), u = (2x - 1) dx has zero mean; the unique primitive with
  // vanishing endpoint values is x^2 - x
  StarDomain omega = StarDomain::ball(1, make_point({0.5}), 0.5, 0.5);
  Mollifier mol = build_bump(1, make_point({0.5}), 0.3, 4);
  BogovskiiConfig cfg(mol, omega, 1);
  cfg.z_grid = 200;
  cfg.t_quad_order = 32;
  auto u = [&omega](const Point& p) {
    FormValue v(1, 1);
    if (omega.contains(p)) v[0] = 2.0 * p[0] - 1.0;
    return v;
  };
  for (double x : {0.12, 0.3, 0.5, 0.77, 0.96}) {
    FormValue v = apply_bogovskii(cfg, u, make_point({x}));
    CHECK(v[0] == Catch::Approx(x * x - x).margin(1e-3));
  }

  // zero input
  auto zero = [](const Point&) { return FormValue(1, 1); };
  CHECK(apply_bogovskii(cfg, zero, make_point({0.4})).max_abs() == 0.0);
}

TEST_CASE("ray form agrees with the (s,y) rewrite away from the ball") {
  StarDomain disk = StarDomain::ball(2, Point{}, 1.0, 0.45);
  Mollifier mol = build_bump(2, Point{}, 0.4, 4);
  BumpWindow win;
  win.n = 2;
  win.center = make_point({0.1, 0.0});
  win.semi_axes = make_point({0.8, 0.8});
  Rng rng(31);
  PolyForm p = random_form(2, 1, 2, rng);
  BumpForm w(win, p);
  auto u = [&w](const Point& y) { return w.d_value(y); };

  BogovskiiConfig cfg(mol, disk, 2);
  cfg.z_grid = 64;
  cfg.t_quad_order = 32;
  for (Point x : {make_point({0.45, 0.2}), make_point({-0.3, -0.35})}) {
    FormValue ray = apply_bogovskii(cfg, u, x);
    FormValue sy = bogovskii_sy_oracle(mol, disk, 2, u, x, 64, 48);
    FormValue diff = ray - sy;
    REQUIRE(ray.max_abs() > 1e-2);
    CHECK(diff.max_abs() / ray.max_abs() <= 1e-4);
  }
}

TEST_CASE("scalar component split matches the reduced operator") {
  StarDomain disk = StarDomain::ball(2, Point{}, 1.0, 0.45);
  Mollifier mol = build_bump(2, Point{}, 0.4, 4);
  BogovskiiConfig cfg(mol, disk, 1);
  cfg.z_grid = 48;
  cfg.t_quad_order = 24;

  BumpWindow win;
  win.n = 2;
  win.center = Point{};
  win.semi_axes = make_point({0.85, 0.85});
  auto f = [&win](const Point& y) { return win.value(y) * (1.0 + y[0] - 0.5 * y[1]); };
  const int m = 0;
  auto g = [&f, m](const Point& y) { return y[static_cast<std::size_t>(m)] * f(y); };

  for (Point x : {make_point({0.7, 0.2}), make_point({-0.35, -0.45})}) {
    double split = -component_Q(cfg, 1, g, m, x) + component_Q(cfg, 2, f, m, x);
    double direct = q_sy_oracle(mol, disk, 1, f, m, x, 64, 48);
    REQUIRE(std::abs(direct) > 5e-4);
    CHECK(std::abs(split - direct) / std::abs(direct) <= 2e-3);
  }

  // zero and scaling
  auto zero = [](const Point&) { return 0.0; };
  Point x = make_point({0.3, 0.3});
  CHECK(component_Q(cfg, 1, zero, m, x) == 0.0);
  auto f3 = [&f](const Point& y) { return 3.0 * f(y); };
  CHECK(component_Q(cfg, 2, f3, m, x) ==
        Catch::Approx(3.0 * component_Q(cfg, 2, f, m, x)).margin(1e-14));
}

TEST_CASE("locality outside the hull") {
  // u supported in a small off-center blob; B around the origin. At points x
  // outside hull(B cup supp u) no ray from B through x meets the support, so
  // the quadrature returns an exact zero.
  StarDomain disk = StarDomain::ball(2, Point{}, 1.0, 0.45);
  Mollifier mol = build_bump(2, Point{}, 0.4, 4);
  BumpWindow win;
  win.n = 2;
  win.center = make_point({0.3, 0.25});
  win.semi_axes = make_point({0.2, 0.2});
  PolyForm p(2, 0);
  p[0] = MultiPoly::constant(2, 1.0) + MultiPoly::variable(2, 0);
  BumpForm w(win, p);
  auto u = [&w](const Point& y) { return w.d_value(y); };

  BogovskiiConfig cfg(mol, disk, 1);
  cfg.z_grid = 32;
  cfg.t_quad_order = 12;

  // far side of the disk, opposite the blob
  for (Point x : {make_point({-0.7, -0.55}), make_point({-0.85, 0.2}), make_point({0.1, -0.9})}) {
    CHECK(apply_bogovskii(cfg, u, x).max_abs() == 0.0);
  }
  // sanity: inside the hull it is nonzero
  CHECK(apply_bogovskii(cfg, u, make_point({0.3, 0.25})).max_abs() > 1e-6);
}

TEST_CASE("linearity at matched nodes") {
  StarDomain disk = StarDomain::ball(2, Point{}, 1.0, 0.45);
  Mollifier mol = build_bump(2, Point{}, 0.4, 4);
  BogovskiiConfig cfg(mol, disk, 1);
  cfg.z_grid = 24;
  cfg.t_quad_order = 8;
  BumpWindow win;
  win.n = 2;
  win.center = Point{};
  win.semi_axes = make_point({0.8, 0.8});
  Rng rng(3);
  PolyForm p1 = random_form(2, 0, 2, rng), p2 = random_form(2, 0, 2, rng);
  BumpForm w1(win, p1), w2(win, p2);
  auto ua = [&w1](const Point& y) { return w1.d_value(y); };
  auto ub = [&w2](const Point& y) { return w2.d_value(y); };
  auto ucomb = [&w1, &w2](const Point& y) {
    FormValue v = w1.d_value(y);
    v *= 2.0;
    FormValue v2 = w2.d_value(y);
    v2 *= -0.5;
    return v + v2;
  };
  Point x = make_point({0.25, -0.3});
  FormValue lhs = apply_bogovskii(cfg, ucomb, x);
  FormValue rhs = 2.0 * apply_bogovskii(cfg, ua, x) + (-0.5) * apply_bogovskii(cfg, ub, x);
  FormValue diff = lhs - rhs;
  CHECK(diff.max_abs() <= 1e-12 * std::max(1.0, lhs.max_abs()));
}

TEST_CASE("exactness d(Bu) = u for a compactly supported pair") {
  StarDomain disk = StarDomain::ball(2, Point{}, 1.0, 0.45);
  Mollifier mol = build_bump(2, Point{}, 0.405, 4);
  BogovskiiConfig cfg(mol, disk, 1);
  cfg.z_grid = 64;
  cfg.t_quad_order = 32;

  BumpWindow win;
  win.n = 2;
  win.center = Point{};
  win.semi_axes = make_point({0.9, 0.9});
  PolyForm p(2, 0);
  p[0] = MultiPoly::variable(2, 0);
  BumpForm w(win, p);

  std::vector<Point> samples = {make_point({0.22, -0.37}), make_point({0.17, 0.37}),
                                make_point({0.58, 0.07}),  make_point({-0.32, -0.12}),
                                make_point({0.07, 0.7})};
  ExactnessReport rep = exactness_check_bogovskii(cfg, w, 0.01, samples);
  CHECK(rep.max_relative_residual <= 5e-3);

  // fd step validation: h must stay below 0.01 R
  CHECK_THROWS_AS(exactness_check_bogovskii(cfg, w, 0.05, samples), std::invalid_argument);

  // zero input gives zero residual
  PolyForm zerop(2, 0);
  BumpForm wz(win, zerop);
  ExactnessReport rz = exactness_check_bogovskii(cfg, wz, 0.01, samples);
  CHECK(rz.max_relative_residual == 0.0);
}

TEST_CASE("config validation") {
  StarDomain disk = StarDomain::ball(2, Point{}, 1.0, 0.45);
  Mollifier big = build_bump(2, Point{}, 0.6, 4);
  CHECK_THROWS_AS(BogovskiiConfig(big, disk, 1), std::invalid_argument);
  Mollifier ok = build_bump(2, Point{}, 0.4, 4);
  CHECK_THROWS_AS(BogovskiiConfig(ok, disk, 0), std::invalid_argument);
  BogovskiiConfig cfg(ok, disk, 1);
  CHECK(cfg.singular_cutoff == Catch::Approx(1e-3 * 0.9));
}
