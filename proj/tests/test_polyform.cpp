#include <catch2/catch_amalgamated.hpp>

#include "starforms/polyform.hpp"

using namespace starforms;

TEST_CASE("multipoly arithmetic and degree") {
  MultiPoly x = MultiPoly::variable(2, 0);
  MultiPoly y = MultiPoly::variable(2, 1);
  MultiPoly p = x * y + MultiPoly::constant(2, 3.0);
  CHECK(p.degree() == 2);
  CHECK(p.evaluate(make_point({2.0, 5.0})) == Catch::Approx(13.0));

  MultiPoly zero(2);
  CHECK(zero.degree() == kZeroPolyDegree);
  CHECK(zero.is_zero());

  MultiPoly q = p - p;
  CHECK(q.is_zero());

  // normalization drops tiny coefficients
  MultiPoly tiny = MultiPoly::constant(2, 1e-15);
  tiny.normalize();
  CHECK(tiny.is_zero());
}

TEST_CASE("multipoly derivative") {
  MultiPoly x = MultiPoly::variable(2, 0);
  MultiPoly p = x * x * MultiPoly::variable(2, 1);  // x^2 y
  MultiPoly dx = p.derivative(0);
  CHECK(dx.evaluate(make_point({3.0, 2.0})) == Catch::Approx(12.0));
  CHECK(p.derivative(0).derivative(1).evaluate(make_point({3.0, 1.0})) == Catch::Approx(6.0));
}

TEST_CASE("exterior derivative basics") {
  // u = x1 dx2 -> dx1 ^ dx2
  PolyForm u(2, 1);
  u[IndexTuple{2}] = MultiPoly::variable(2, 0);
  PolyForm du = exterior_derivative(u);
  CHECK(du[IndexTuple{1, 2}].evaluate(Point{}) == Catch::Approx(1.0));

  // 0-form product rule
  PolyForm f(2, 0);
  f[IndexTuple{}] = MultiPoly::variable(2, 0) * MultiPoly::variable(2, 1);
  PolyForm df = exterior_derivative(f);
  Point p = make_point({2.0, 7.0});
  CHECK(df[IndexTuple{1}].evaluate(p) == Catch::Approx(7.0));
  CHECK(df[IndexTuple{2}].evaluate(p) == Catch::Approx(2.0));

  // d(d(x1^2 x2)) has exactly zero coefficients
  PolyForm g(2, 0);
  MultiPoly x = MultiPoly::variable(2, 0);
  g[IndexTuple{}] = x * x * MultiPoly::variable(2, 1);
  PolyForm ddg = exterior_derivative(exterior_derivative(g));
  CHECK(ddg.is_zero());

  PolyForm top(2, 2);
  CHECK_THROWS_AS(exterior_derivative(top), std::invalid_argument);
}

TEST_CASE("d squared is structurally zero on random forms") {
  for (int n = 2; n <= 4; ++n)
    for (int l = 0; l + 2 <= n; ++l)
      for (int rep = 0; rep < 10; ++rep) {
        Rng rng(1000 * n + 100 * l + static_cast<std::uint64_t>(rep));
        PolyForm u = random_form(n, l, 4, rng);
        PolyForm ddu = exterior_derivative(exterior_derivative(u));
        CHECK(ddu.is_zero());
      }
}

TEST_CASE("Leibniz rule d(fu) = df ^ u + f du") {
  Rng rng(99);
  for (int n = 2; n <= 3; ++n)
    for (int l = 0; l < n; ++l)
      for (int rep = 0; rep < 10; ++rep) {
        PolyForm u = random_form(n, l, 3, rng);
        PolyForm fform = random_form(n, 0, 3, rng);
        const MultiPoly& f = fform[0];
        PolyForm lhs = exterior_derivative(multiply(f, u));
        PolyForm df(n, 1);
        for (int j = 0; j < n; ++j) df[j] = f.derivative(j);
        PolyForm rhs = wedge(df, u) + multiply(f, exterior_derivative(u));
        PolyForm diff = lhs - rhs;
        CHECK(diff.max_abs_coefficient() <= 1e-12);
      }
}

TEST_CASE("evaluation") {
  PolyForm u(2, 1);
  u[IndexTuple{2}] = MultiPoly::variable(2, 0);
  FormValue v = evaluate(u, make_point({3.0, 5.0}));
  CHECK(v[IndexTuple{2}] == Catch::Approx(3.0));
  CHECK(v[IndexTuple{1}] == 0.0);

  PolyForm zero(3, 2);
  CHECK(evaluate(zero, make_point({1.0, 2.0, 3.0})).max_abs() == 0.0);

  PolyForm w(2, 1);
  MultiPoly x = MultiPoly::variable(2, 0);
  w[IndexTuple{1}] = x * x;
  CHECK(evaluate(w, make_point({2.0, -1.0}))[IndexTuple{1}] == Catch::Approx(4.0));
}

TEST_CASE("random closed forms are closed and deterministic") {
  for (int n = 2; n <= 3; ++n)
    for (int l = 1; l <= n; ++l) {
      PolyForm u = random_closed_form(n, l, 3, 42);
      if (l < n) CHECK(exterior_derivative(u).is_zero());
      PolyForm v = random_closed_form(n, l, 3, 42);
      PolyForm diff = u - v;
      CHECK(diff.is_zero());
      PolyForm other = random_closed_form(n, l, 3, 43);
      PolyForm diff2 = u - other;
      CHECK(diff2.max_abs_coefficient() > 0.0);
    }
  CHECK_THROWS_AS(random_closed_form(2, 0, 3, 1), std::invalid_argument);
}

TEST_CASE("serialization round trip") {
  Rng rng(4);
  PolyForm u = random_form(3, 2, 3, rng);
  std::string text = to_text(u);
  PolyForm v = parse_polyform(text, 3);
  PolyForm diff = u - v;
  CHECK(diff.max_abs_coefficient() <= 1e-16);
  CHECK(v.degree() == 2);

  // format spot check: degree; tuple; exponents; coefficient
  PolyForm w(2, 1);
  Expo e{};
  e[0] = 1;
  w[IndexTuple{2}] = MultiPoly::monomial(2, e, 1.25);
  CHECK(to_text(w) == "1; I=(2); alpha=(1,0); 1.25\n");
}
