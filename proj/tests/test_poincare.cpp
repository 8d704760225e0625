#include <catch2/catch_amalgamated.hpp>

#include "starforms/poincare.hpp"

using namespace starforms;

TEST_CASE("moment path on elementary inputs") {
  // n = 1, u = dx, mollifier centered at c: P u = (x - c), and d(Pu) = u
  double c = 0.3;
  Mollifier mol = build_bump(1, make_point({c}), 0.2, 6);
  PoincareConfig cfg(mol, 1);
  PolyForm u(1, 1);
  u[IndexTuple{1}] = MultiPoly::constant(1, 1.0);
  PolyForm v = apply_poincare_poly(cfg, u);
  REQUIRE(v.degree() == 0);
  CHECK(v[0].evaluate(make_point({1.0}))== Catch::Approx(1.0 - c).margin(1e-12));
  CHECK(v[0].evaluate(make_point({0.0}))== Catch::Approx(-c).margin(1e-12));
  PolyForm dv = exterior_derivative(v);
  PolyForm diff = dv - u;
  CHECK(diff.max_abs_coefficient() <= 1e-12);

  // n = 2, u = dx1, centered mollifier: P u = x1
  Mollifier mol2 = build_bump(2, Point{}, 0.4, 6);
  PoincareConfig cfg2(mol2, 1);
  PolyForm u2(2, 1);
  u2[IndexTuple{1}] = MultiPoly::constant(2, 1.0);
  PolyForm v2 = apply_poincare_poly(cfg2, u2);
  CHECK(v2[0].evaluate(make_point({2.0, -1.0})) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("null-homotopy on random closed forms") {
  for (int n = 2; n <= 3; ++n) {
    Mollifier mol = build_bump(n, Point{}, 0.4, 10);
    for (int l = 1; l <= n; ++l) {
      PoincareConfig cfg(mol, l);
      for (int rep = 0; rep < 5; ++rep) {
        PolyForm u = random_closed_form(n, l, 3, 100 * n + 10 * l + static_cast<std::uint64_t>(rep));
        PolyForm v = apply_poincare_poly(cfg, u);
        PolyForm dv = exterior_derivative(v);
        PolyForm diff = dv - u;
        CHECK(diff.max_abs_coefficient() <= 1e-8);
      }
    }
  }
}

TEST_CASE("homotopy identity on general forms") {
  for (int n = 2; n <= 3; ++n) {
    Mollifier mol = build_bump(n, make_point({0.05, -0.05, 0.02}), 0.35, 10);
    for (int l = 1; l < n; ++l) {
      Rng rng(7 * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(l));
      PolyForm u = random_form(n, l, 3, rng);
      PoincareConfig cfg(mol, l);
      PoincareConfig cfg_up(mol, l + 1);
      PolyForm lhs = exterior_derivative(apply_poincare_poly(cfg, u)) +
                     apply_poincare_poly(cfg_up, exterior_derivative(u));
      PolyForm diff = lhs - u;
      CHECK(diff.max_abs_coefficient() <= 1e-8);
    }
  }
}

TEST_CASE("linearity is exact on the symbolic path") {
  Mollifier mol = build_bump(2, Point{}, 0.4, 10);
  PoincareConfig cfg(mol, 1);
  Rng rng(11);
  PolyForm u = random_form(2, 1, 3, rng);
  PolyForm v = random_form(2, 1, 3, rng);
  PolyForm lhs = apply_poincare_poly(cfg, 2.0 * u + (-3.0) * v);
  PolyForm rhs = 2.0 * apply_poincare_poly(cfg, u) + (-3.0) * apply_poincare_poly(cfg, v);
  PolyForm diff = lhs - rhs;
  CHECK(diff.max_abs_coefficient() <= 1e-12);
}

TEST_CASE("moment table too small names the required degree") {
  Mollifier mol = build_bump(2, Point{}, 0.4, 3);
  PoincareConfig cfg(mol, 1);
  Rng rng(2);
  PolyForm u = random_form(2, 1, 3, rng);
  CHECK_THROWS_WITH(apply_poincare_poly(cfg, u), Catch::Matchers::ContainsSubstring("need 4"));
}

TEST_CASE("scalar component operators") {
  Mollifier mol = build_bump(2, Point{}, 0.4, 8);
  PoincareConfig cfg(mol, 1);
  cfg.s_quad_order = 20;
  cfg.z_grid = 48;

  auto one = [](const Point&) { return 1.0; };
  Point x = make_point({0.3, 0.1});
  for (int k = 1; k <= 3; ++k) {
    CHECK(component_P(cfg, 1, k, one, 0, x) == Catch::Approx(1.0 / k).epsilon(1e-6));
    // P_2^k of 1 is the first moment over k; zero for the centered bump
    CHECK(std::abs(component_P(cfg, 2, k, one, 0, x)) <= 1e-10);
  }

  // the split identity also holds on the quadrature path at matched nodes
  {
    Rng rng2(13);
    PolyForm g = random_form(2, 0, 3, rng2);
    auto gc = [&g](const Point& p) { return g[0].evaluate(p); };
    PolyForm gform(2, 1);
    gform[IndexTuple{1}] = g[0];
    auto uc = [&gform](const Point& p) { return evaluate(gform, p); };
    PoincareConfig c1(mol, 1);
    c1.s_quad_order = 12;
    c1.z_grid = 24;
    Point xx = make_point({0.4, -0.25});
    double whole = apply_poincare_quad(c1, uc, xx)[0];
    double split = xx[0] * component_P(c1, 1, 1, gc, 0, xx) - component_P(c1, 2, 1, gc, 0, xx);
    CHECK(std::abs(whole - split) <= 1e-10);
  }

  // reduced-operator identity P_l f = x_m P_1^l f - P_2^l f on the moment path
  Rng rng(3);
  PolyForm fform = random_form(2, 0, 3, rng);
  const MultiPoly& f = fform[0];
  for (int m = 0; m < 2; ++m) {
    MultiPoly lhs = reduced_poincare_poly(mol, 1, f, m);
    MultiPoly rhs = MultiPoly::variable(2, m) * component_P_poly(mol, 1, 1, f, m) -
                    component_P_poly(mol, 2, 1, f, m);
    MultiPoly diff = lhs - rhs;
    CHECK(diff.max_abs_coefficient() <= 1e-10);
  }

  // callable path agrees with the symbolic path
  auto fc = [&f](const Point& p) { return f.evaluate(p); };
  MultiPoly sym = component_P_poly(mol, 1, 2, f, 0);
  CHECK(component_P(cfg, 1, 2, fc, 0, x) == Catch::Approx(sym.evaluate(x)).margin(1e-8));
}

TEST_CASE("quadrature path agrees with the moment path") {
  Mollifier mol = build_bump(2, make_point({0.05, 0.0}), 0.35, 10);
  Rng rng(5);
  for (int l = 1; l <= 2; ++l) {
    PolyForm u = random_form(2, l, 3, rng);
    PoincareConfig cfg(mol, l);
    cfg.s_quad_order = 16;
    cfg.z_grid = 40;
    PolyForm exact = apply_poincare_poly(cfg, u);
    auto uc = [&u](const Point& p) { return evaluate(u, p); };
    for (int rep = 0; rep < 3; ++rep) {
      Point x = make_point({rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)});
      FormValue approx = apply_poincare_quad(cfg, uc, x);
      FormValue diff = approx - evaluate(exact, x);
      CHECK(diff.max_abs() <= 1e-6);
    }

    // zero input gives zero output
    auto zero = [l](const Point&) { return FormValue(2, l); };
    CHECK(apply_poincare_quad(cfg, zero, make_point({0.2, 0.3})).max_abs() == 0.0);

    // scaling
    auto u5 = [&u](const Point& p) { return 5.0 * evaluate(u, p); };
    Point x = make_point({0.4, -0.2});
    FormValue a = apply_poincare_quad(cfg, u5, x);
    FormValue b = 5.0 * apply_poincare_quad(cfg, uc, x);
    FormValue d = a - b;
    CHECK(d.max_abs() <= 1e-12);
  }
}

TEST_CASE("quadrature path converges in the s order") {
  Mollifier mol = build_bump(2, Point{}, 0.35, 10);
  Rng rng(9);
  PolyForm u = random_form(2, 1, 4, rng);
  auto uc = [&u](const Point& p) { return evaluate(u, p); };
  Point x = make_point({0.5, 0.4});
  PoincareConfig hi(mol, 1);
  hi.s_quad_order = 40;
  hi.z_grid = 48;
  FormValue ref = apply_poincare_quad(hi, uc, x);
  double prev = 1e9;
  for (int order : {2, 4, 8}) {
    PoincareConfig cfg(mol, 1);
    cfg.s_quad_order = order;
    cfg.z_grid = 48;
    FormValue diff = apply_poincare_quad(cfg, uc, x) - ref;
    double err = diff.max_abs();
    CHECK(err <= prev + 1e-14);
    prev = err;
  }
  CHECK(prev <= 1e-9);
}

TEST_CASE("derivative formula residuals") {
  Mollifier mol = build_bump(2, make_point({0.1, -0.05}), 0.4, 12);
  Rng rng(21);
  PolyForm fform = random_form(2, 0, 3, rng);
  const MultiPoly& f = fform[0];
  Point x = make_point({0.7, -0.3});
  for (int l = 1; l <= 2; ++l) {
    PoincareConfig cfg(mol, l);
    for (int m = 0; m < 2; ++m)
      for (int j = 0; j < 2; ++j) {
        CHECK(poincare_gradient_check(cfg, f, m, j, x) <= 1e-9);
        for (int a = 0; a < 2; ++a)
          CHECK(poincare_second_derivative_check(cfg, f, m, j, a, x) <= 1e-9);
      }
  }

  // constant f, j != m: the delta term drops and the residual stays tiny
  MultiPoly cf = MultiPoly::constant(2, 2.5);
  PoincareConfig cfg(mol, 1);
  CHECK(poincare_gradient_check(cfg, cf, 0, 1, x) <= 1e-10);
}

TEST_CASE("config validation") {
  Mollifier mol = build_bump(2, Point{}, 0.4, 6);
  CHECK_THROWS_AS(PoincareConfig(mol, 0), std::invalid_argument);
  CHECK_THROWS_AS(PoincareConfig(mol, 3), std::invalid_argument);
}
