#include <catch2/catch_amalgamated.hpp>

#include "starforms/geometry.hpp"

using namespace starforms;

TEST_CASE("containment for analytic shapes") {
  StarDomain ball = StarDomain::ball(2, Point{}, 1.0);
  CHECK(ball.contains(Point{}));
  CHECK_FALSE(ball.contains(make_point({2.0, 0.0})));

  StarDomain ell = StarDomain::ellipsoid(2, Point{}, make_point({2.0, 1.0}));
  CHECK(ell.contains(make_point({1.5, 0.0})));
  CHECK_FALSE(ell.contains(make_point({0.0, 1.5})));

  StarDomain cig = StarDomain::stadium(2, Point{}, 1.0, 0.5);
  CHECK(cig.contains(make_point({1.2, 0.3})));
  CHECK_FALSE(cig.contains(make_point({1.2, 0.49})));
  CHECK_FALSE(cig.contains(make_point({0.0, 0.51})));
}

TEST_CASE("ray exit times") {
  StarDomain ball = StarDomain::ball(2, Point{}, 1.0);
  CHECK(ball.ray_exit(Point{}, make_point({0.5, 0.0})) == Catch::Approx(2.0));
  CHECK(ball.ray_exit(Point{}, make_point({0.9, 0.0})) == Catch::Approx(1.0 / 0.9));

  double a = 3.0;
  StarDomain ell = StarDomain::ellipsoid(2, Point{}, make_point({a, 1.0}));
  CHECK(ell.ray_exit(Point{}, make_point({a / 2.0, 0.0})) == Catch::Approx(2.0));

  CHECK_THROWS_AS(ball.ray_exit(Point{}, Point{}), std::invalid_argument);

  // bisection path: exit point sits on the boundary within 1e-10 R
  StarDomain cig = StarDomain::stadium(2, Point{}, 1.0, 0.5);
  Point z = make_point({-0.2, 0.1});
  Point x = make_point({0.8, 0.25});
  double T = cig.ray_exit(z, x);
  REQUIRE(T > 1.0);
  Point exit{};
  for (int i = 0; i < 2; ++i)
    exit[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] +
                                        T * (x[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)]);
  CHECK(std::abs(cig.level(exit) - 1.0) * 0.5 <= 1e-9 * cig.diameter());
}

TEST_CASE("segment stays inside up to the exit point") {
  StarDomain cig = StarDomain::stadium(2, Point{}, 1.0, 0.5, 0.5);
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    Point z = make_point({rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
    if (!cig.contains(z)) continue;
    Point x = make_point({rng.uniform(-1.4, 1.4), rng.uniform(-0.45, 0.45)});
    if (!cig.contains(x) || dist(x, z, 2) < 1e-12) continue;
    double T = cig.ray_exit(z, x);
    REQUIRE(T >= 1.0);
    for (int k = 0; k <= 20; ++k) {
      double t = T * k / 20.0 * 0.999;
      Point p{};
      for (int i = 0; i < 2; ++i)
        p[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] +
                                         t * (x[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)]);
      CHECK(cig.level(p) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("domain stats") {
  StarDomain ball = StarDomain::ball(2, Point{}, 1.0, 0.5);
  DomainStats s = domain_stats(ball);
  CHECK(s.R == Catch::Approx(2.0));
  CHECK(s.vol_omega == Catch::Approx(M_PI));
  CHECK(s.ratio_diam == Catch::Approx(2.0));
  CHECK(s.ratio_vol == Catch::Approx(4.0));

  double a = 2.5;
  StarDomain ell = StarDomain::ellipsoid(2, Point{}, make_point({a, 1.0}));
  DomainStats se = domain_stats(ell);
  CHECK(se.R == Catch::Approx(2.0 * a));
  CHECK(se.vol_omega == Catch::Approx(M_PI * a));

  StarDomain cig = StarDomain::stadium(3, Point{}, 1.0, 0.5);
  DomainStats sc = domain_stats(cig);
  CHECK(sc.R == Catch::Approx(3.0));
  CHECK(sc.vol_omega == Catch::Approx(4.0 / 3.0 * M_PI * 0.125 + 2.0 * M_PI * 0.25));
}

TEST_CASE("stats invariant under rigid motion") {
  StarDomain c1 = StarDomain::stadium(2, Point{}, 1.0, 0.5);
  CigarShape rotated{make_point({2.0, -1.0}), make_point({2.0, 1.0}), 0.5};
  StarDomain c2(2, rotated, BallShape{make_point({2.0, 0.0}), 0.5});
  DomainStats s1 = domain_stats(c1), s2 = domain_stats(c2);
  CHECK(s1.R == Catch::Approx(s2.R));
  CHECK(s1.vol_omega == Catch::Approx(s2.vol_omega));
  CHECK(s1.ratio_vol == Catch::Approx(s2.ratio_vol));
}

TEST_CASE("quadrature nodes converge to the volume") {
  StarDomain cig = StarDomain::stadium(2, Point{}, 0.5, 0.5);
  double vol = cig.volume();
  QuadratureNodes q4 = quadrature_nodes(cig, 4);
  CHECK(std::abs(q4.sum_weights() - vol) / vol < 0.01);

  for (const Point& p : q4.points) CHECK(cig.contains(p));

  QuadratureNodes q1 = quadrature_nodes(cig, 1);
  QuadratureNodes q2 = quadrature_nodes(cig, 2);
  QuadratureNodes q3 = quadrature_nodes(cig, 3);
  CHECK(q2.points.size() > q1.points.size());
  CHECK(q3.points.size() > q2.points.size());

  double e2 = std::abs(q2.sum_weights() - vol);
  double e4 = std::abs(q4.sum_weights() - vol);
  CHECK(e4 < e2);
  CHECK_THROWS_AS(quadrature_nodes(cig, 0), std::invalid_argument);
}

TEST_CASE("radial star 2d volume and containment") {
  RadialStar2DShape prof;
  prof.center = Point{};
  prof.a0 = 1.0;
  prof.cos_coef = {0.2};
  StarDomain dom(2, prof, BallShape{Point{}, 0.5});
  // area of r(phi) = 1 + 0.2 cos(phi) is pi (a0^2 + c1^2/2)
  CHECK(dom.volume() == Catch::Approx(M_PI * (1.0 + 0.5 * 0.04)));
  CHECK(dom.contains(make_point({1.1, 0.0})));
  CHECK_FALSE(dom.contains(make_point({-1.1, 0.0})));
}

TEST_CASE("star-shape verification") {
  StarDomain ball = StarDomain::ball(2, Point{}, 1.0, 0.4);
  CHECK(verify_star_shape(ball, 200, 1).ok);

  StarDomain ell = StarDomain::ellipsoid(2, Point{}, make_point({2.0, 1.0}), 0.8);
  CHECK(verify_star_shape(ell, 200, 2).ok);

  // crescent: a dimpled limacon r = 0.6 - 0.55 cos(phi); segments from a ball
  // in the upper horn to points in the lower horn cut across the dimple
  RadialStar2DShape crescent;
  crescent.center = Point{};
  crescent.a0 = 0.6;
  crescent.cos_coef = {-0.55};
  StarDomain dom(2, crescent, BallShape{make_point({0.1, 0.1}), 0.035});
  StarShapeReport rep = verify_star_shape(dom, 2000, 3);
  CHECK_FALSE(rep.ok);
  CHECK(rep.worst_level > 1.0);
  bool found_outside = false;
  for (int k = 1; k < 64; ++k) {
    double t = k / 64.0;
    Point p{};
    for (int i = 0; i < 2; ++i)
      p[static_cast<std::size_t>(i)] = rep.witness_ball[static_cast<std::size_t>(i)] +
                                       t * (rep.witness_domain[static_cast<std::size_t>(i)] -
                                            rep.witness_ball[static_cast<std::size_t>(i)]);
    if (!dom.contains(p)) found_outside = true;
  }
  CHECK(found_outside);

  CHECK_THROWS_AS(verify_star_shape(ball, 0, 1), std::invalid_argument);
}
