#include <catch2/catch_amalgamated.hpp>

#include "starforms/constants.hpp"

using namespace starforms;

namespace {
DomainStats with_ratio(double ratio_vol, double ratio_diam = 2.0) {
  DomainStats s;
  s.R = ratio_diam;
  s.rho = 1.0;
  s.vol_ball = 1.0;
  s.vol_omega = ratio_vol;
  s.ratio_diam = ratio_diam;
  s.ratio_vol = ratio_vol;
  return s;
}
const double kE = std::exp(1.0);
}  // namespace

TEST_CASE("kappa for the Poincare-type operator") {
  CHECK(kappa_poincare(2, 2, with_ratio(kE)) == 1.0);                  // 2l > n
  CHECK(kappa_poincare(2, 1, with_ratio(kE)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(kappa_poincare(4, 1, with_ratio(kE)) ==
        Catch::Approx(std::exp(1.0 / 3.0)).margin(1e-12));
  CHECK(kappa_poincare(3, 1, with_ratio(kE)) ==
        Catch::Approx(std::pow(kE, 0.25)).margin(1e-12));  // 2l = n - 1 branch

  CHECK_THROWS_AS(kappa_poincare(2, 1, with_ratio(0.9)), std::invalid_argument);
  CHECK_THROWS_AS(kappa_poincare(2, 0, with_ratio(2.0)), std::invalid_argument);
  CHECK_THROWS_AS(kappa_poincare(2, 3, with_ratio(2.0)), std::invalid_argument);
}

TEST_CASE("kappa for the Bogovskii-type operator") {
  CHECK(kappa_bogovskii(3, 1, with_ratio(kE)) == 1.0);  // l < n/2 + 1
  CHECK(kappa_bogovskii(2, 2, with_ratio(kE)) == Catch::Approx(2.0).margin(1e-12));
  CHECK(kappa_bogovskii(2, 2, with_ratio(kE * kE)) == Catch::Approx(3.0).margin(1e-12));
  CHECK_THROWS_AS(kappa_bogovskii(2, 2, with_ratio(0.5)), std::invalid_argument);
}

TEST_CASE("branch dispatch is total over 1 <= ell <= n <= 6") {
  for (int n = 1; n <= 6; ++n)
    for (int ell = 1; ell <= n; ++ell) {
      double kp = kappa_poincare(n, ell, with_ratio(kE));
      double kb = kappa_bogovskii(n, ell, with_ratio(kE));
      CHECK(std::isfinite(kp));
      CHECK(std::isfinite(kb));
      CHECK(kp >= 1.0 - 1e-12);
      CHECK(kb >= 1.0 - 1e-12);
    }
}

TEST_CASE("kappa continuity in the volume ratio") {
  for (int n = 2; n <= 5; ++n)
    for (int ell = 1; ell <= n; ++ell) {
      double prev_p = -1.0, prev_b = -1.0;
      for (double r = 1.5; r < 40.0; r *= 1.07) {
        double kp = kappa_poincare(n, ell, with_ratio(r));
        double kb = kappa_bogovskii(n, ell, with_ratio(r));
        if (prev_p > 0.0) {
          CHECK(std::abs(kp - prev_p) <= 0.12 * prev_p + 0.05);
          CHECK(std::abs(kb - prev_b) <= 0.12 * prev_b + 0.05);
        }
        prev_p = kp;
        prev_b = kb;
      }
    }
}

TEST_CASE("h1 bound formula") {
  DomainStats s = with_ratio(kE, 4.0);
  CHECK(h1_bound(OperatorKind::poincare, 2, 2, s, 1.0) == Catch::Approx(4.0));

  // doubling R at fixed rho and volume ratio doubles the bound in a kappa = 1 regime
  DomainStats s2 = with_ratio(kE, 8.0);
  CHECK(h1_bound(OperatorKind::poincare, 2, 2, s2, 1.0) ==
        Catch::Approx(2.0 * h1_bound(OperatorKind::poincare, 2, 2, s, 1.0)));

  DomainStats s3 = with_ratio(kE, 3.0);
  CHECK(h1_bound(OperatorKind::bogovskii, 2, 2, s3, 1.0) == Catch::Approx(6.0));

  CHECK_THROWS_AS(h1_bound(OperatorKind::poincare, 2, 2, s, 0.0), std::invalid_argument);
}

TEST_CASE("h2 bound") {
  CHECK(h2_bound_poincare(2, 2, 2.0, 1.0) == Catch::Approx(0.5));
  CHECK(h2_bound_poincare(2, 2, 1.0, 1.0) == Catch::Approx(2.0 * h2_bound_poincare(2, 2, 2.0, 1.0)));
  CHECK_THROWS_AS(h2_bound_poincare(3, 1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("zero-mean Poincare constant") {
  CHECK(poincare_constant_KP(2, with_ratio(kE, 2.0), 1.0) == Catch::Approx(4.0));
  CHECK(poincare_constant_KP(2, with_ratio(kE, 2.0), 0.0) == 0.0);
  double a = poincare_constant_KP(3, with_ratio(3.0, 2.0), 1.0);
  double b = poincare_constant_KP(3, with_ratio(6.0, 2.0), 1.0);
  CHECK(b > a);
  CHECK_THROWS_AS(poincare_constant_KP(2, with_ratio(0.8), 1.0), std::invalid_argument);
}

TEST_CASE("chain bound formulas") {
  CHECK(chain_bound(false, 1, 2, 3.0, 1.0, 1.0, 1.0, 1.0, 1.0) == Catch::Approx(6.0));
  CHECK(chain_bound(false, 2, 2, 5.0, 2.0, 0.0, 1.0, 1.0, 1.0) == Catch::Approx(10.0));
  CHECK(chain_bound(true, 1, 2, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0) ==
        Catch::Approx(4.0 * std::sqrt(2.0)));

  // spelled-out no-bc formula for l >= 2
  double c_t = 2.0, c_p = 1.5, c_s = 3.0, D = 2.0, d = 0.5;
  double inner = c_t * c_p * D / d + 1.0;
  CHECK(chain_bound(false, 3, 3, c_t, c_p, c_s, D, d, 1.0) ==
        Catch::Approx(2.0 * c_t * std::sqrt(1.0 + 32.0 * c_s * c_s * std::pow(inner, 4))));

  CHECK_THROWS_AS(chain_bound(true, 2, 2, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(chain_bound(false, 0, 2, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(chain_bound(false, 1, 2, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("empirical ratio basics") {
  StarDomain disk = StarDomain::ball(2, Point{}, 1.0, 0.45);
  EmpiricalConfig cfg;
  cfg.quad_level = 3;

  BoundReport rep = estimate_empirical_ratio(OperatorKind::poincare, disk, cfg, 1, 4, 3, 99);
  CHECK(rep.empirical_ratio >= 0.0);
  CHECK(rep.samples.size() == 4);
  // exact 1-forms: any primitive's H1 seminorm equals the input L2 norm
  CHECK(rep.empirical_ratio == Catch::Approx(1.0).margin(1e-7));

  BoundReport rep2 = estimate_empirical_ratio(OperatorKind::poincare, disk, cfg, 1, 4, 3, 99);
  CHECK(rep.empirical_ratio == rep2.empirical_ratio);
  CHECK(rep.samples == rep2.samples);

  BoundReport rl2 = estimate_empirical_ratio(OperatorKind::poincare, disk, cfg, 2, 4, 3, 7);
  CHECK(rl2.empirical_ratio > 0.0);
  CHECK(rl2.kappa_value == 1.0);

  CHECK_THROWS_AS(estimate_empirical_ratio(OperatorKind::poincare, disk, cfg, 1, 0, 3, 1),
                  std::invalid_argument);
}

TEST_CASE("empirical ratio invariant under input scaling") {
  StarDomain disk = StarDomain::ball(2, Point{}, 1.0, 0.45);
  EmpiricalConfig cfg;
  cfg.quad_level = 2;
  Mollifier mol = build_bump(2, Point{}, 0.9 * 0.45, 12);
  PolyForm u = random_closed_form(2, 2, 3, 5);
  double r1 = empirical_ratio_single(OperatorKind::poincare, disk, cfg, mol, u);
  PolyForm u5 = 5.0 * u;
  double r5 = empirical_ratio_single(OperatorKind::poincare, disk, cfg, mol, u5);
  CHECK(r1 == Catch::Approx(r5).epsilon(1e-12));
}

TEST_CASE("bogovskii empirical ratio runs and is positive") {
  StarDomain disk = StarDomain::ball(2, Point{}, 1.0, 0.45);
  EmpiricalConfig cfg;
  cfg.quad_level = 2;
  cfg.z_grid = 20;
  cfg.t_quad_order = 8;
  BoundReport rep = estimate_empirical_ratio(OperatorKind::bogovskii, disk, cfg, 1, 2, 2, 123);
  CHECK(rep.empirical_ratio > 0.0);
  CHECK(std::isfinite(rep.empirical_ratio));
}
