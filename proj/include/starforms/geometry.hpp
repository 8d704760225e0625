#ifndef STARFORMS_GEOMETRY_HPP
#define STARFORMS_GEOMETRY_HPP

#include <algorithm>
#include <limits>
#include <variant>
#include <vector>

#include "starforms/common.hpp"

namespace starforms {

struct BallShape {
  Point center{};
  double radius = 1.0;
};

// axis-aligned
struct EllipsoidShape {
  Point center{};
  Point semi_axes{};
};

// tube of given radius around the segment [a, b] (a stadium in 2-D, a capsule above)
struct CigarShape {
  Point a{};
  Point b{};
  double radius = 1.0;
};

// n = 2 only: boundary |x - c| = a0 + sum_k (ck cos(k phi) + sk sin(k phi))
struct RadialStar2DShape {
  Point center{};
  double a0 = 1.0;
  std::vector<double> cos_coef;
  std::vector<double> sin_coef;

  double profile(double phi) const {
    double r = a0;
    for (std::size_t k = 0; k < cos_coef.size(); ++k) r += cos_coef[k] * std::cos((k + 1) * phi);
    for (std::size_t k = 0; k < sin_coef.size(); ++k) r += sin_coef[k] * std::sin((k + 1) * phi);
    return r;
  }
};

inline double unit_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

inline double segment_distance(const Point& x, const Point& a, const Point& b, int n) {
  Point d{};
  double len2 = 0.0, proj = 0.0;
  for (int i = 0; i < n; ++i) {
    d[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)];
    len2 += d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)];
    proj += (x[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]) * d[static_cast<std::size_t>(i)];
  }
  double t = (len2 > 0.0) ? std::clamp(proj / len2, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double e = x[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)] - t * d[static_cast<std::size_t>(i)];
    s += e * e;
  }
  return std::sqrt(s);
}

struct DomainStats {
  double R = 0.0;           // diam(Omega)
  double rho = 0.0;         // diam(B)
  double vol_omega = 0.0;   // |Omega|
  double vol_ball = 0.0;    // |B|
  double ratio_diam = 0.0;  // R / rho
  double ratio_vol = 0.0;   // |Omega| / |B|
};

// Star-shaped domain descriptor: an analytic shape plus the user-supplied ball
// the star-shape structure refers to (mollifier supports live inside it).
class StarDomain {
 public:
  using Shape = std::variant<BallShape, EllipsoidShape, CigarShape, RadialStar2DShape>;

  StarDomain() : StarDomain(1, BallShape{Point{}, 1.0}, BallShape{Point{}, 1.0}) {}

  StarDomain(int n, Shape shape, BallShape inscribed)
      : n_(n), shape_(std::move(shape)), inscribed_(inscribed) {
    check_dim(n);
    if (inscribed_.radius <= 0.0) throw std::invalid_argument("StarDomain: inscribed ball radius must be > 0");
    if (std::holds_alternative<RadialStar2DShape>(shape_) && n != 2)
      throw std::invalid_argument("RadialStar2D requires n = 2");
  }

  static StarDomain ball(int n, const Point& c, double r, double inscribed_radius = -1.0) {
    BallShape b{c, r};
    BallShape ins{c, inscribed_radius > 0.0 ? inscribed_radius : r};
    return StarDomain(n, b, ins);
  }

  static StarDomain ellipsoid(int n, const Point& c, const Point& semi_axes,
                              double inscribed_radius = -1.0) {
    double amin = semi_axes[0];
    for (int i = 1; i < n; ++i) amin = std::min(amin, semi_axes[static_cast<std::size_t>(i)]);
    BallShape ins{c, inscribed_radius > 0.0 ? inscribed_radius : amin};
    return StarDomain(n, EllipsoidShape{c, semi_axes}, ins);
  }

  // collinear stadium along the x1-axis, centered at `center`
  static StarDomain stadium(int n, const Point& center, double half_length, double tube_radius,
                            double inscribed_radius = -1.0) {
    Point a = center, b = center;
    a[0] -= half_length;
    b[0] += half_length;
    BallShape ins{center, inscribed_radius > 0.0 ? inscribed_radius : tube_radius};
    return StarDomain(n, CigarShape{a, b, tube_radius}, ins);
  }

  int dim() const { return n_; }
  const Shape& shape() const { return shape_; }
  const BallShape& inscribed_ball() const { return inscribed_; }

  // level(x) <= 1 exactly on the domain; smooth indicator used for membership,
  // bisection and violation scoring
  double level(const Point& x) const {
    return std::visit(
        [&](const auto& s) -> double { return level_impl(s, x); }, shape_);
  }

  bool contains(const Point& x) const { return level(x) <= 1.0; }

  void bounding_box(Point& lo, Point& hi) const {
    std::visit([&](const auto& s) { bbox_impl(s, lo, hi); }, shape_);
  }

  double diameter() const {
    return std::visit([&](const auto& s) -> double { return diam_impl(s); }, shape_);
  }

  // Lebesgue measure; closed form for ball/ellipsoid/cigar, exact trapezoid
  // integration of the trigonometric profile for radial stars
  double volume() const {
    return std::visit([&](const auto& s) -> double { return volume_impl(s); }, shape_);
  }

  // T = sup{ t >= 1 : z + t(x - z) in Omega }; analytic for ball/ellipsoid,
  // bisection on `level` otherwise. Exit point lies on the boundary within 1e-10 R.
  double ray_exit(const Point& z, const Point& x) const {
    double d2 = 0.0;
    for (int i = 0; i < n_; ++i) {
      double d = x[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)];
      d2 += d * d;
    }
    if (d2 == 0.0) throw std::invalid_argument("ray_exit: degenerate ray (x == z)");
    if (const auto* b = std::get_if<BallShape>(&shape_)) return exit_quadric(*b, z, x);
    if (const auto* e = std::get_if<EllipsoidShape>(&shape_)) return exit_quadric_ellipsoid(*e, z, x);
    if (const auto* c = std::get_if<CigarShape>(&shape_)) {
      Point dir{};
      for (int i = 0; i < n_; ++i)
        dir[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)];
      double t = exit_cigar(*c, z, dir);
      if (t >= 0.0) return t;
    }
    return exit_bisect(z, x);
  }

  // sup{ t >= 0 : origin + t dir in Omega } for origin inside the domain
  double exit_param(const Point& origin, const Point& dir) const {
    Point x = origin;
    for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] += dir[static_cast<std::size_t>(i)];
    if (const auto* b = std::get_if<BallShape>(&shape_)) return exit_quadric(*b, origin, x);
    if (const auto* e = std::get_if<EllipsoidShape>(&shape_)) return exit_quadric_ellipsoid(*e, origin, x);
    if (const auto* c = std::get_if<CigarShape>(&shape_)) {
      double t = exit_cigar(*c, origin, dir);
      if (t >= 0.0) return t;
    }
    auto at = [&](double t) {
      Point p = origin;
      for (int i = 0; i < n_; ++i)
        p[static_cast<std::size_t>(i)] += t * dir[static_cast<std::size_t>(i)];
      return p;
    };
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (level(at(hi)) <= 1.0) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 64) throw std::runtime_error("exit_param: unbounded ray");
    }
    const double tol = 1e-10 * diameter() / norm(dir, n_);
    while (hi - lo > tol) {
      double mid = 0.5 * (lo + hi);
      (level(at(mid)) <= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  // --- level -------------------------------------------------------------
  double level_impl(const BallShape& s, const Point& x) const {
    return dist(x, s.center, n_) / s.radius;
  }
  double level_impl(const EllipsoidShape& s, const Point& x) const {
    double q = 0.0;
    for (int i = 0; i < n_; ++i) {
      double w = (x[static_cast<std::size_t>(i)] - s.center[static_cast<std::size_t>(i)]) /
                 s.semi_axes[static_cast<std::size_t>(i)];
      q += w * w;
    }
    return std::sqrt(q);
  }
  double level_impl(const CigarShape& s, const Point& x) const {
    return segment_distance(x, s.a, s.b, n_) / s.radius;
  }
  double level_impl(const RadialStar2DShape& s, const Point& x) const {
    double dx = x[0] - s.center[0], dy = x[1] - s.center[1];
    double r = std::hypot(dx, dy);
    if (r == 0.0) return 0.0;
    return r / s.profile(std::atan2(dy, dx));
  }

  // --- bbox ----------------------------------------------------------------
  void bbox_impl(const BallShape& s, Point& lo, Point& hi) const {
    for (int i = 0; i < n_; ++i) {
      lo[static_cast<std::size_t>(i)] = s.center[static_cast<std::size_t>(i)] - s.radius;
      hi[static_cast<std::size_t>(i)] = s.center[static_cast<std::size_t>(i)] + s.radius;
    }
  }
  void bbox_impl(const EllipsoidShape& s, Point& lo, Point& hi) const {
    for (int i = 0; i < n_; ++i) {
      lo[static_cast<std::size_t>(i)] =
          s.center[static_cast<std::size_t>(i)] - s.semi_axes[static_cast<std::size_t>(i)];
      hi[static_cast<std::size_t>(i)] =
          s.center[static_cast<std::size_t>(i)] + s.semi_axes[static_cast<std::size_t>(i)];
    }
  }
  void bbox_impl(const CigarShape& s, Point& lo, Point& hi) const {
    for (int i = 0; i < n_; ++i) {
      lo[static_cast<std::size_t>(i)] =
          std::min(s.a[static_cast<std::size_t>(i)], s.b[static_cast<std::size_t>(i)]) - s.radius;
      hi[static_cast<std::size_t>(i)] =
          std::max(s.a[static_cast<std::size_t>(i)], s.b[static_cast<std::size_t>(i)]) + s.radius;
    }
  }
  void bbox_impl(const RadialStar2DShape& s, Point& lo, Point& hi) const {
    double rmax = 0.0;
    for (int k = 0; k < 4096; ++k) rmax = std::max(rmax, s.profile(2.0 * M_PI * k / 4096));
    lo[0] = s.center[0] - rmax;
    hi[0] = s.center[0] + rmax;
    lo[1] = s.center[1] - rmax;
    hi[1] = s.center[1] + rmax;
  }

  // --- diameter --------------------------------------------------------------
  double diam_impl(const BallShape& s) const { return 2.0 * s.radius; }
  double diam_impl(const EllipsoidShape& s) const {
    double amax = 0.0;
    for (int i = 0; i < n_; ++i) amax = std::max(amax, s.semi_axes[static_cast<std::size_t>(i)]);
    return 2.0 * amax;
  }
  double diam_impl(const CigarShape& s) const { return dist(s.a, s.b, n_) + 2.0 * s.radius; }
  double diam_impl(const RadialStar2DShape& s) const {
    const int M = 2048;
    std::vector<double> bx(M), by(M);
    for (int k = 0; k < M; ++k) {
      double phi = 2.0 * M_PI * k / M, r = s.profile(phi);
      bx[static_cast<std::size_t>(k)] = s.center[0] + r * std::cos(phi);
      by[static_cast<std::size_t>(k)] = s.center[1] + r * std::sin(phi);
    }
    double d2 = 0.0;
    for (int i = 0; i < M; ++i)
      for (int j = i + 1; j < M; ++j) {
        double dx = bx[static_cast<std::size_t>(i)] - bx[static_cast<std::size_t>(j)];
        double dy = by[static_cast<std::size_t>(i)] - by[static_cast<std::size_t>(j)];
        d2 = std::max(d2, dx * dx + dy * dy);
      }
    return std::sqrt(d2);
  }

  // --- volume -------------------------------------------------------------
  double volume_impl(const BallShape& s) const { return unit_ball_volume(n_) * std::pow(s.radius, n_); }
  double volume_impl(const EllipsoidShape& s) const {
    double v = unit_ball_volume(n_);
    for (int i = 0; i < n_; ++i) v *= s.semi_axes[static_cast<std::size_t>(i)];
    return v;
  }
  double volume_impl(const CigarShape& s) const {
    double L = dist(s.a, s.b, n_);
    double caps = unit_ball_volume(n_) * std::pow(s.radius, n_);
    double tube = (n_ >= 2) ? L * unit_ball_volume(n_ - 1) * std::pow(s.radius, n_ - 1) : L;
    return caps + tube;
  }
  double volume_impl(const RadialStar2DShape& s) const {
    const int M = 4096;
    double acc = 0.0;
    for (int k = 0; k < M; ++k) {
      double r = s.profile(2.0 * M_PI * k / M);
      acc += 0.5 * r * r;
    }
    return acc * 2.0 * M_PI / M;
  }

  // --- ray exits ------------------------------------------------------------
  double exit_quadric(const BallShape& s, const Point& z, const Point& x) const {
    double a = 0.0, b = 0.0, c = -s.radius * s.radius;
    for (int i = 0; i < n_; ++i) {
      double d = x[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)];
      double w = z[static_cast<std::size_t>(i)] - s.center[static_cast<std::size_t>(i)];
      a += d * d;
      b += 2.0 * d * w;
      c += w * w;
    }
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) throw std::runtime_error("ray_exit: ray misses ball (z outside?)");
    return (-b + std::sqrt(disc)) / (2.0 * a);
  }
  double exit_quadric_ellipsoid(const EllipsoidShape& s, const Point& z, const Point& x) const {
    double a = 0.0, b = 0.0, c = -1.0;
    for (int i = 0; i < n_; ++i) {
      double ai = s.semi_axes[static_cast<std::size_t>(i)];
      double d = (x[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)]) / ai;
      double w = (z[static_cast<std::size_t>(i)] - s.center[static_cast<std::size_t>(i)]) / ai;
      a += d * d;
      b += 2.0 * d * w;
      c += w * w;
    }
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) throw std::runtime_error("ray_exit: ray misses ellipsoid");
    return (-b + std::sqrt(disc)) / (2.0 * a);
  }
  // Forward boundary crossing of the capsule along origin + t dir, in closed
  // form: the tube piece is a quadratic in the components transverse to the
  // axis, the caps are sphere crossings; each candidate is kept only when the
  // crossing point projects into that piece's region. Returns -1 when no
  // candidate validates (degenerate seam hit) so the caller can fall back to
  // bisection. Assumes the segment [a, b] is axis-aligned along x1, which is
  // what the stadium builders produce; other cigars take the bisection path.
  double exit_cigar(const CigarShape& s, const Point& origin, const Point& dir) const {
    for (int i = 1; i < n_; ++i)
      if (s.a[static_cast<std::size_t>(i)] != s.b[static_cast<std::size_t>(i)]) return -1.0;
    const double lo = std::min(s.a[0], s.b[0]), hi = std::max(s.a[0], s.b[0]);
    const double r2 = s.radius * s.radius;
    double best = -1.0;
    auto consider = [&](double t, double x1lo, double x1hi) {
      if (t <= 0.0) return;
      double x1 = origin[0] + t * dir[0];
      if (x1 < x1lo - 1e-12 || x1 > x1hi + 1e-12) return;
      if (best < 0.0 || t < best) best = t;
    };
    // tube: |p_perp(t)|^2 = r^2 with x1 in [lo, hi]
    {
      double a = 0.0, b = 0.0, c = -r2;
      for (int i = 1; i < n_; ++i) {
        double oi = origin[static_cast<std::size_t>(i)] - s.a[static_cast<std::size_t>(i)];
        double di = dir[static_cast<std::size_t>(i)];
        a += di * di;
        b += 2.0 * oi * di;
        c += oi * oi;
      }
      if (a > 0.0) {
        double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) consider((-b + std::sqrt(disc)) / (2.0 * a), lo, hi);
      }
    }
    // caps
    for (double cap : {lo, hi}) {
      double a = 0.0, b = 0.0, c = -r2;
      for (int i = 0; i < n_; ++i) {
        double ci = (i == 0) ? cap : s.a[static_cast<std::size_t>(i)];
        double oi = origin[static_cast<std::size_t>(i)] - ci;
        double di = dir[static_cast<std::size_t>(i)];
        a += di * di;
        b += 2.0 * oi * di;
        c += oi * oi;
      }
      double disc = b * b - 4.0 * a * c;
      if (disc < 0.0 || a == 0.0) continue;
      double t = (-b + std::sqrt(disc)) / (2.0 * a);
      if (cap == lo)
        consider(t, -std::numeric_limits<double>::infinity(), lo);
      else
        consider(t, hi, std::numeric_limits<double>::infinity());
    }
    return best;
  }

  double exit_bisect(const Point& z, const Point& x) const {
    auto at = [&](double t) {
      Point p = z;
      for (int i = 0; i < n_; ++i)
        p[static_cast<std::size_t>(i)] += t * (x[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)]);
      return p;
    };
    double lo = 1.0;
    if (level(at(lo)) > 1.0) return 1.0;  // x already on/over the boundary
    double hi = 2.0;
    int guard = 0;
    while (level(at(hi)) <= 1.0) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 64) throw std::runtime_error("ray_exit: unbounded ray");
    }
    const double seg = dist(x, z, n_);
    const double tol = 1e-10 * diameter() / seg;
    while (hi - lo > tol) {
      double mid = 0.5 * (lo + hi);
      (level(at(mid)) <= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  int n_;
  Shape shape_;
  BallShape inscribed_;
};

inline DomainStats domain_stats(const StarDomain& dom) {
  DomainStats s;
  s.R = dom.diameter();
  s.rho = 2.0 * dom.inscribed_ball().radius;
  s.vol_omega = dom.volume();
  s.vol_ball = unit_ball_volume(dom.dim()) * std::pow(dom.inscribed_ball().radius, dom.dim());
  s.ratio_diam = s.R / s.rho;
  s.ratio_vol = s.vol_omega / s.vol_ball;
  return s;
}

// Midpoint-rule nodes on the bounding box, masked by membership. Every node
// carries the same weight (the cell volume), and the per-axis resolution
// doubles with each level.
struct QuadratureNodes {
  std::vector<Point> points;
  double weight = 0.0;
  int n = 0;

  double sum_weights() const { return weight * static_cast<double>(points.size()); }
};

inline QuadratureNodes quadrature_nodes(const StarDomain& dom, int level) {
  if (level < 1) throw std::invalid_argument("quadrature_nodes: level >= 1 required");
  const int n = dom.dim();
  Point lo{}, hi{};
  dom.bounding_box(lo, hi);
  double longest = 0.0;
  for (int i = 0; i < n; ++i)
    longest = std::max(longest, hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
  const double h = longest / (16.0 * std::pow(2.0, level - 1));

  std::array<int, kMaxDim> cells{};
  std::array<double, kMaxDim> step{};
  double cellvol = 1.0;
  for (int i = 0; i < n; ++i) {
    double ext = hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
    cells[static_cast<std::size_t>(i)] = std::max(1, static_cast<int>(std::ceil(ext / h)));
    step[static_cast<std::size_t>(i)] = ext / cells[static_cast<std::size_t>(i)];
    cellvol *= step[static_cast<std::size_t>(i)];
  }

  QuadratureNodes out;
  out.n = n;
  out.weight = cellvol;
  std::array<int, kMaxDim> idx{};
  while (true) {
    Point p{};
    for (int i = 0; i < n; ++i)
      p[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] +
                                       (idx[static_cast<std::size_t>(i)] + 0.5) * step[static_cast<std::size_t>(i)];
    if (dom.contains(p)) out.points.push_back(p);
    int carry = 0;
    while (carry < n) {
      if (++idx[static_cast<std::size_t>(carry)] < cells[static_cast<std::size_t>(carry)]) break;
      idx[static_cast<std::size_t>(carry)] = 0;
      ++carry;
    }
    if (carry == n) break;
  }
  return out;
}

struct StarShapeReport {
  bool ok = true;
  Point witness_ball{};    // offending segment start in B
  Point witness_domain{};  // offending segment end in Omega
  double worst_level = 0.0;  // max level along offending segments (<= 1 means none)
};

// Monte-Carlo check of the convex-hull condition: segments from sampled points
// of the ball to sampled points of the domain must stay inside.
inline StarShapeReport verify_star_shape(const StarDomain& dom, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("verify_star_shape: samples >= 1 required");
  const int n = dom.dim();
  Rng rng(seed);
  Point lo{}, hi{};
  dom.bounding_box(lo, hi);
  const BallShape& B = dom.inscribed_ball();

  StarShapeReport rep;
  auto sample_domain = [&]() {
    for (int tries = 0; tries < 100000; ++tries) {
      Point p{};
      for (int i = 0; i < n; ++i)
        p[static_cast<std::size_t>(i)] = rng.uniform(lo[static_cast<std::size_t>(i)], hi[static_cast<std::size_t>(i)]);
      if (dom.contains(p)) return p;
    }
    throw std::runtime_error("verify_star_shape: rejection sampling failed");
  };
  auto sample_ball = [&]() {
    for (int tries = 0; tries < 100000; ++tries) {
      Point p{};
      for (int i = 0; i < n; ++i)
        p[static_cast<std::size_t>(i)] =
            B.center[static_cast<std::size_t>(i)] + B.radius * rng.uniform(-1.0, 1.0);
      if (dist(p, B.center, n) <= B.radius) return p;
    }
    throw std::runtime_error("verify_star_shape: ball sampling failed");
  };

  const int kSegmentSamples = 48;
  for (int s = 0; s < samples; ++s) {
    Point b = sample_ball();
    // the inscribed ball itself must sit inside the domain
    if (double lv = dom.level(b); lv > 1.0 + 1e-12) {
      rep.ok = false;
      if (lv > rep.worst_level) {
        rep.worst_level = lv;
        rep.witness_ball = b;
        rep.witness_domain = b;
      }
      continue;
    }
    Point y = sample_domain();
    for (int k = 1; k < kSegmentSamples; ++k) {
      double t = static_cast<double>(k) / kSegmentSamples;
      Point p{};
      for (int i = 0; i < n; ++i)
        p[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] +
                                         t * (y[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]);
      double lv = dom.level(p);
      if (lv > 1.0 + 1e-12) {
        rep.ok = false;
        if (lv > rep.worst_level) {
          rep.worst_level = lv;
          rep.witness_ball = b;
          rep.witness_domain = y;
        }
      }
    }
  }
  if (rep.ok) rep.worst_level = 1.0;
  return rep;
}

}  // namespace starforms

#endif
