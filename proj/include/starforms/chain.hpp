#ifndef STARFORMS_CHAIN_HPP
#define STARFORMS_CHAIN_HPP

#include "starforms/constants.hpp"

namespace starforms {

// ---------------------------------------------------------------------------
// chain geometry: congruent stadium links along the x1-axis with stadium
// overlaps, and a quintic-ramp partition of unity in x1

namespace detail {

// quintic smoothstep and derivatives on [0, 1]
inline double smoothstep5(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
inline double smoothstep5_d1(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }
inline double smoothstep5_d2(double t) { return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }

}  // namespace detail

// One descending ramp in x1: value 1 left of [a, b], 0 right of it, quintic in
// between (C^2 across the seams).
struct AxisRamp {
  double a = 0.0;
  double b = 1.0;

  double value(double x) const {
    if (x <= a) return 1.0;
    if (x >= b) return 0.0;
    return 1.0 - detail::smoothstep5((x - a) / (b - a));
  }
  double d1(double x) const {
    if (x <= a || x >= b) return 0.0;
    double w = b - a;
    return -detail::smoothstep5_d1((x - a) / w) / w;
  }
  double d2(double x) const {
    if (x <= a || x >= b) return 0.0;
    double w = b - a;
    return -detail::smoothstep5_d2((x - a) / w) / (w * w);
  }
};

// Partition of unity subordinate to the chain: phi_i is the product of the
// complementary ramps of its two overlap slabs. Ramps are inset from the
// overlap so each phi_i vanishes near the part of its link boundary interior
// to the chain.
class ChainPartition {
 public:
  ChainPartition() = default;
  explicit ChainPartition(std::vector<AxisRamp> ramps) : ramps_(std::move(ramps)) {}

  int pieces() const { return static_cast<int>(ramps_.size()) + 1; }

  double value(int i, const Point& x) const {
    double v = 1.0;
    if (i > 0) v *= 1.0 - ramps_[static_cast<std::size_t>(i - 1)].value(x[0]);
    if (i + 1 < pieces()) v *= ramps_[static_cast<std::size_t>(i)].value(x[0]);
    return v;
  }

  // d/dx1 and d2/dx1^2 (the only varying direction)
  double d1(int i, const Point& x) const {
    double lv = (i > 0) ? 1.0 - ramps_[static_cast<std::size_t>(i - 1)].value(x[0]) : 1.0;
    double ld = (i > 0) ? -ramps_[static_cast<std::size_t>(i - 1)].d1(x[0]) : 0.0;
    double rv = (i + 1 < pieces()) ? ramps_[static_cast<std::size_t>(i)].value(x[0]) : 1.0;
    double rd = (i + 1 < pieces()) ? ramps_[static_cast<std::size_t>(i)].d1(x[0]) : 0.0;
    return ld * rv + lv * rd;
  }
  double d2(int i, const Point& x) const {
    double lv = (i > 0) ? 1.0 - ramps_[static_cast<std::size_t>(i - 1)].value(x[0]) : 1.0;
    double ld = (i > 0) ? -ramps_[static_cast<std::size_t>(i - 1)].d1(x[0]) : 0.0;
    double ldd = (i > 0) ? -ramps_[static_cast<std::size_t>(i - 1)].d2(x[0]) : 0.0;
    double rv = (i + 1 < pieces()) ? ramps_[static_cast<std::size_t>(i)].value(x[0]) : 1.0;
    double rd = (i + 1 < pieces()) ? ramps_[static_cast<std::size_t>(i)].d1(x[0]) : 0.0;
    double rdd = (i + 1 < pieces()) ? ramps_[static_cast<std::size_t>(i)].d2(x[0]) : 0.0;
    return ldd * rv + 2.0 * ld * rd + lv * rdd;
  }

 private:
  std::vector<AxisRamp> ramps_;
};

struct ChainDecomposition {
  int n = 2;
  int links_count = 0;
  std::vector<StarDomain> links;     // Omega_1 .. Omega_N
  std::vector<StarDomain> overlaps;  // Omega_{i+1/2}, i = 1 .. N-1
  StarDomain total;                  // the union (a stadium again)
  ChainPartition partition;
  std::vector<double> d_i;  // per link: min of adjacent overlap diameters
  double measured_c_s = 0.0;
  double inset_fraction = 0.02;
  double tube_radius = 0.0;

  // lowest link index containing x, or -1
  int link_of(const Point& x) const {
    for (int i = 0; i < links_count; ++i)
      if (links[static_cast<std::size_t>(i)].contains(x)) return i;
    return -1;
  }
};

// Axis-aligned chain of N congruent stadium links. `overlap_fraction` is the
// shared axis length of adjacent links relative to the link axis length; the
// inscribed balls sit at the link and overlap centers with the tube radius.
// All decomposition assumptions are verified by sampling before returning.
inline ChainDecomposition build_chain(int n, int links, double half_length, double tube_radius,
                                      double overlap_fraction, std::uint64_t seed = 2024,
                                      double inset_fraction = 0.02) {
  check_dim(n);
  if (links < 2) throw std::invalid_argument("build_chain: need at least two links");
  if (half_length <= 0.0 || tube_radius <= 0.0)
    throw std::invalid_argument("build_chain: link dimensions must be positive");
  if (overlap_fraction <= 0.0 || overlap_fraction >= 0.5)
    throw std::invalid_argument("build_chain: overlap fraction must lie in (0, 1/2)");

  const double axis_len = 2.0 * half_length;
  const double ov = overlap_fraction * axis_len;  // shared axis length
  const double spacing = axis_len - ov;
  // links two apart must be disjoint: 2 spacing > axis_len + 2 r
  if (links >= 3 && 2.0 * spacing <= axis_len + 2.0 * tube_radius)
    throw std::invalid_argument(
        "build_chain: non-adjacent links would intersect; shrink the overlap or the tube radius");

  ChainDecomposition chain;
  chain.n = n;
  chain.links_count = links;
  chain.inset_fraction = inset_fraction;
  chain.tube_radius = tube_radius;

  const double x0 = -0.5 * (links - 1) * spacing;
  std::vector<double> centers;
  for (int i = 0; i < links; ++i) {
    double c = x0 + i * spacing;
    centers.push_back(c);
    Point pc{};
    pc[0] = c;
    chain.links.push_back(StarDomain::stadium(n, pc, half_length, tube_radius));
  }
  std::vector<AxisRamp> ramps;
  for (int i = 0; i + 1 < links; ++i) {
    double lo = centers[static_cast<std::size_t>(i + 1)] - half_length;
    double hi = centers[static_cast<std::size_t>(i)] + half_length;
    if (lo >= hi) throw std::invalid_argument("build_chain: adjacent links do not overlap");
    Point oc{};
    oc[0] = 0.5 * (lo + hi);
    chain.overlaps.push_back(StarDomain::stadium(n, oc, 0.5 * (hi - lo), tube_radius));
    double inset = inset_fraction * (hi - lo);
    AxisRamp r{lo + inset, hi - inset};
    if (r.a >= r.b) throw std::invalid_argument("build_chain: overlap slab misordered after inset");
    ramps.push_back(r);
  }
  chain.partition = ChainPartition(std::move(ramps));

  Point tc{};
  tc[0] = 0.5 * (centers.front() + centers.back());
  chain.total =
      StarDomain::stadium(n, tc, half_length + 0.5 * (centers.back() - centers.front()), tube_radius);

  for (int i = 0; i < links; ++i) {
    double dl = (i > 0) ? chain.overlaps[static_cast<std::size_t>(i - 1)].diameter()
                        : std::numeric_limits<double>::infinity();
    double dr = (i + 1 < links) ? chain.overlaps[static_cast<std::size_t>(i)].diameter()
                                : std::numeric_limits<double>::infinity();
    chain.d_i.push_back(std::min(dl, dr));
  }

  // --- sampled verification of the decomposition assumptions ---------------
  Rng rng(seed);
  Point lo{}, hi{};
  chain.total.bounding_box(lo, hi);
  auto sample_total = [&]() {
    while (true) {
      Point p{};
      for (int k = 0; k < n; ++k)
        p[static_cast<std::size_t>(k)] = rng.uniform(lo[static_cast<std::size_t>(k)], hi[static_cast<std::size_t>(k)]);
      if (chain.total.contains(p)) return p;
    }
  };
  auto fail = [](const std::string& what, const Point& p) {
    throw std::runtime_error("build_chain: " + what + " violated at (" + std::to_string(p[0]) + ", " +
                             std::to_string(p[1]) + ")");
  };
  for (int s = 0; s < 2000; ++s) {
    Point p = sample_total();
    int hits = 0;
    for (const StarDomain& link : chain.links)
      if (link.contains(p)) ++hits;
    if (hits < 1 || hits > 2) fail("1 <= #{i : x in Omega_i} <= 2", p);
    for (int i = 0; i < links; ++i)
      for (int j = i + 2; j < links; ++j)
        if (chain.links[static_cast<std::size_t>(i)].contains(p) &&
            chain.links[static_cast<std::size_t>(j)].contains(p))
          fail("pairwise disjointness for |i-j| > 1", p);
    double sum = 0.0;
    for (int i = 0; i < links; ++i) {
      double phi = chain.partition.value(i, p);
      if (phi < -1e-12 || phi > 1.0 + 1e-12) fail("0 <= phi_i <= 1", p);
      if (phi > 1e-12 && !chain.links[static_cast<std::size_t>(i)].contains(p))
        fail("phi_i = 0 outside Omega_i", p);
      sum += phi;
    }
    if (std::abs(sum - 1.0) > 1e-12) fail("sum phi_i = 1", p);
  }
  for (const StarDomain& ovl : chain.overlaps) {
    StarShapeReport rep = verify_star_shape(ovl, 100, rng.next());
    if (!rep.ok) fail("overlap star-shapedness", rep.witness_domain);
  }

  // measured separation constant: sup |d^a phi_i| d_i^|a| over |a| <= 2,
  // sampled densely along the axis
  double c_s = 1.0;  // the |a| = 0 term
  for (int i = 0; i < links; ++i) {
    double di = chain.d_i[static_cast<std::size_t>(i)];
    if (!std::isfinite(di)) continue;
    for (int k = 0; k <= 4096; ++k) {
      Point p{};
      p[0] = lo[0] + (hi[0] - lo[0]) * k / 4096.0;
      c_s = std::max(c_s, std::abs(chain.partition.d1(i, p)) * di);
      c_s = std::max(c_s, std::abs(chain.partition.d2(i, p)) * di * di);
    }
  }
  chain.measured_c_s = c_s;
  return chain;
}

// mollifier on the inscribed ball of a chain piece
inline Mollifier piece_mollifier(const StarDomain& dom, double shrink = 0.9, int moment_degree = 12) {
  const BallShape& b = dom.inscribed_ball();
  return build_bump(dom.dim(), b.center, shrink * b.radius, moment_degree);
}

// ---------------------------------------------------------------------------
// gluing without boundary conditions: local Poincare primitives eta_i on the
// links, corrections on the overlaps, assembled into one global primitive

struct ChainPrimitive {
  int n = 2;
  int ell = 1;
  std::vector<PolyForm> eta;        // per link, degree ell-1
  std::vector<PolyForm> w_corr;     // per overlap, degree ell-2 (ell >= 2)
  std::vector<PolyForm> dw_corr;    // exterior derivatives of the corrections
  std::vector<double> constants;    // per link (ell == 1)
  const ChainDecomposition* chain = nullptr;

  // v on link i (agrees across overlaps by construction)
  FormValue value(int i, const Point& x) const {
    FormValue v = evaluate(eta[static_cast<std::size_t>(i)], x);
    if (ell == 1) {
      v[0] += constants[static_cast<std::size_t>(i)];
      return v;
    }
    // + d(phi_{i-1} w_{i-1/2}) - d(phi_{i+1} w_{i+1/2})
    for (int side = -1; side <= 1; side += 2) {
      int nb = i + side;                      // neighbour link owning the ramp factor
      int ov = (side < 0) ? i - 1 : i;        // overlap index
      if (nb < 0 || nb >= chain->links_count) continue;
      const PolyForm& w = w_corr[static_cast<std::size_t>(ov)];
      double phi = chain->partition.value(nb, x);
      double dphi = chain->partition.d1(nb, x);
      double sgn = (side < 0) ? 1.0 : -1.0;
      // d(phi w) = phi' dx1 ^ w + phi dw
      FormValue e1(n, 1);
      e1[IndexTuple{1}] = 1.0;
      FormValue t = wedge(e1, evaluate(w, x));
      t *= dphi;
      t += phi * evaluate(dw_corr[static_cast<std::size_t>(ov)], x);
      v += sgn * t;
    }
    return v;
  }

  // partial derivative d/dx_j of v on link i
  FormValue derivative(int i, int j, const Point& x) const {
    PolyForm deta(n, ell - 1);
    for (int a = 0; a < deta.components(); ++a)
      deta[a] = eta[static_cast<std::size_t>(i)][a].derivative(j);
    FormValue v = evaluate(deta, x);
    if (ell == 1) return v;
    for (int side = -1; side <= 1; side += 2) {
      int nb = i + side;
      int ov = (side < 0) ? i - 1 : i;
      if (nb < 0 || nb >= chain->links_count) continue;
      const PolyForm& w = w_corr[static_cast<std::size_t>(ov)];
      const PolyForm& dw = dw_corr[static_cast<std::size_t>(ov)];
      double phi = chain->partition.value(nb, x);
      double d1 = chain->partition.d1(nb, x);
      double d2 = (j == 0) ? chain->partition.d2(nb, x) : 0.0;
      double dphi_j = (j == 0) ? d1 : 0.0;
      double sgn = (side < 0) ? 1.0 : -1.0;
      FormValue e1(n, 1);
      e1[IndexTuple{1}] = 1.0;
      // d_j [phi' dx1 ^ w + phi dw]
      PolyForm wj(n, ell - 2), dwj(n, ell - 1);
      for (int a = 0; a < wj.components(); ++a) wj[a] = w[a].derivative(j);
      for (int a = 0; a < dwj.components(); ++a) dwj[a] = dw[a].derivative(j);
      FormValue t = wedge(e1, evaluate(w, x));
      t *= d2;  // phi'' delta_{j0} dx1 ^ w
      FormValue t2 = wedge(e1, evaluate(wj, x));
      t2 *= d1;  // phi' dx1 ^ d_j w
      t += t2;
      FormValue t3 = evaluate(dw, x);
      t3 *= dphi_j;  // phi' delta_{j0} dw
      t += t3;
      FormValue t4 = evaluate(dwj, x);
      t4 *= phi;  // phi d_j(dw)
      t += t4;
      v += sgn * t;
    }
    return v;
  }
};

struct GlueNoBcReport {
  double max_dv_residual = 0.0;      // coefficientwise |d eta_i - u| over links
  double max_interface_jump = 0.0;   // sup over overlap samples |v_{i+1} - v_i|
  double b_constancy_std = 0.0;      // ell = 1: max std of eta_i - eta_{i+1} on overlaps
  double v_h1 = 0.0;                 // |v|_{H1(Omega)}
  double u_l2 = 0.0;                 // ||u||_{L2(Omega)}
};

struct GlueNoBcResult {
  ChainPrimitive v;
  GlueNoBcReport report;
};

inline GlueNoBcResult glue_no_bc(const ChainDecomposition& chain, const PolyForm& u,
                                 int quad_level = 3, double mollifier_shrink = 0.9,
                                 int moment_degree = 12) {
  const int n = chain.n, ell = u.degree();
  if (u.dim() != n) throw std::invalid_argument("glue_no_bc: dimension mismatch");
  if (ell < 1) throw std::invalid_argument("glue_no_bc: need ell >= 1");
  if (ell < n && !exterior_derivative(u).is_zero())
    throw std::invalid_argument("glue_no_bc: input form is not closed");

  GlueNoBcResult res;
  ChainPrimitive& v = res.v;
  v.n = n;
  v.ell = ell;
  v.chain = &chain;

  // local primitives
  for (const StarDomain& link : chain.links) {
    Mollifier mol = piece_mollifier(link, mollifier_shrink, moment_degree);
    PoincareConfig cfg(mol, ell);
    v.eta.push_back(apply_poincare_poly(cfg, u));
    PolyForm resid = exterior_derivative(v.eta.back()) - u;
    res.report.max_dv_residual = std::max(res.report.max_dv_residual, resid.max_abs_coefficient());
  }

  if (ell == 1) {
    // eta_i - eta_{i+1} is constant on each overlap; certify and accumulate
    v.constants.assign(static_cast<std::size_t>(chain.links_count), 0.0);
    for (int k = 0; k + 1 < chain.links_count; ++k) {
      QuadratureNodes q = quadrature_nodes(chain.overlaps[static_cast<std::size_t>(k)], quad_level);
      double sum = 0.0, sum2 = 0.0;
      for (const Point& x : q.points) {
        double d = v.eta[static_cast<std::size_t>(k)][0].evaluate(x) -
                   v.eta[static_cast<std::size_t>(k + 1)][0].evaluate(x);
        sum += d;
        sum2 += d * d;
      }
      double m = sum / static_cast<double>(q.points.size());
      double var = std::max(0.0, sum2 / static_cast<double>(q.points.size()) - m * m);
      res.report.b_constancy_std = std::max(res.report.b_constancy_std, std::sqrt(var));
      v.constants[static_cast<std::size_t>(k + 1)] = v.constants[static_cast<std::size_t>(k)] + m;
    }
  } else {
    // corrections d w_{i+1/2} = eta_i - eta_{i+1} on the overlaps
    for (int k = 0; k + 1 < chain.links_count; ++k) {
      const StarDomain& ovl = chain.overlaps[static_cast<std::size_t>(k)];
      Mollifier mol = piece_mollifier(ovl, mollifier_shrink, moment_degree);
      PoincareConfig cfg(mol, ell - 1);
      PolyForm diff = v.eta[static_cast<std::size_t>(k)] - v.eta[static_cast<std::size_t>(k + 1)];
      PolyForm w = apply_poincare_poly(cfg, diff);
      v.w_corr.push_back(w);
      v.dw_corr.push_back(exterior_derivative(w));
    }
  }

  // interface jumps on the overlaps
  for (int k = 0; k + 1 < chain.links_count; ++k) {
    QuadratureNodes q = quadrature_nodes(chain.overlaps[static_cast<std::size_t>(k)], quad_level);
    for (const Point& x : q.points) {
      FormValue jump = v.value(k + 1, x) - v.value(k, x);
      res.report.max_interface_jump = std::max(res.report.max_interface_jump, jump.max_abs());
    }
  }

  // |v|_{H1} and ||u||_{L2} over the union; each point is charged to its
  // lowest containing link
  QuadratureNodes q = quadrature_nodes(chain.total, quad_level);
  double acc_v = 0.0, acc_u = 0.0;
  for (const Point& x : q.points) {
    int i = chain.link_of(x);
    if (i < 0) continue;
    for (int j = 0; j < n; ++j) {
      FormValue dv = v.derivative(i, j, x);
      for (int c = 0; c < dv.components(); ++c) acc_v += dv[c] * dv[c];
    }
    FormValue uv = evaluate(u, x);
    for (int c = 0; c < uv.components(); ++c) acc_u += uv[c] * uv[c];
  }
  res.report.v_h1 = std::sqrt(acc_v * q.weight);
  res.report.u_l2 = std::sqrt(acc_u * q.weight);
  return res;
}

// ---------------------------------------------------------------------------
// gluing with boundary conditions: Bogovskii corrections on the overlaps and
// local Bogovskii solves on the links; v vanishes at the chain boundary

namespace detail {

// uniform-grid tensor Catmull-Rom interpolation of a tabulated scalar field on
// a 2-D box, zero outside
class GridField2D {
 public:
  GridField2D() = default;
  GridField2D(Point lo, double h, int nx, int ny, std::vector<double> vals)
      : lo_(lo), h_(h), nx_(nx), ny_(ny), v_(std::move(vals)) {}

  double operator()(const Point& p) const {
    double fx = (p[0] - lo_[0]) / h_, fy = (p[1] - lo_[1]) / h_;
    int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
    if (ix < 1 || iy < 1 || ix > nx_ - 3 || iy > ny_ - 3) return 0.0;
    double tx = fx - ix, ty = fy - iy;
    double rows[4];
    for (int r = -1; r <= 2; ++r) {
      const double* row = &v_[static_cast<std::size_t>((iy + r) * nx_ + ix - 1)];
      rows[r + 1] = cr(row[0], row[1], row[2], row[3], tx);
    }
    return cr(rows[0], rows[1], rows[2], rows[3], ty);
  }

 private:
  static double cr(double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                          t * (3.0 * (p1 - p2) + p3 - p0)));
  }
  Point lo_{};
  double h_ = 1.0;
  int nx_ = 0, ny_ = 0;
  std::vector<double> v_;
};

}  // namespace detail

struct GlueBcReport {
  double max_dv_residual_rel = 0.0;   // sup |dv - u| / sup |u| at sample points
  double lemma_b_residual = 0.0;      // trace pairing of d(phi_{i+1} u) on overlaps
  double zero_integral_residual = 0.0;  // |int d(phi_{i+1} u)| when ell + 1 = n
  double locality_max = 0.0;          // sup |v_i| outside Omega_i
  double correction_max = 0.0;        // sup of the tabulated corrections
};

// Glue a closed, zero-trace form by the Bogovskii route. Overlap corrections
// w_{i+1/2} = B_{l+1}[d(phi_{i+1} u)] are tabulated on the overlaps; link
// fields v_i = B_l[phi_i u + w_{i+1/2} - w_{i-1/2}] are evaluated on demand;
// v = sum_i v_i. Tabulation is implemented for n = 2.
class GlueBc {
 public:
  GlueBc(const ChainDecomposition& chain, FormField u, int w_grid = 48, int z_grid = 32,
         int t_quad_order = 12, double mollifier_shrink = 0.9)
      : chain_(chain), u_(std::move(u)), z_grid_(z_grid), t_quad_(t_quad_order) {
    const int n = chain.n;
    if (n != 2) throw std::invalid_argument("GlueBc: correction tabulation implemented for n = 2");
    ell_ = u_.degree;
    if (ell_ < 1 || ell_ > n - 1)
      throw std::invalid_argument("GlueBc: need 1 <= ell <= n - 1 (ell = n is out of scope here)");

    // overlap corrections
    for (int k = 0; k + 1 < chain.links_count; ++k) {
      const StarDomain& ovl = chain_.overlaps[static_cast<std::size_t>(k)];
      Mollifier mol = piece_mollifier(ovl, mollifier_shrink, 4);
      BogovskiiConfig bcfg(mol, ovl, ell_ + 1);
      bcfg.z_grid = z_grid_;
      bcfg.t_quad_order = t_quad_;
      int nb = k + 1;
      auto dphi_u = [this, nb](const Point& x) {
        // d(phi_{k+1} u) = d phi ^ u, since du = 0
        FormValue uv = u_.value(x);
        FormValue e1(2, 1);
        e1[IndexTuple{1}] = chain_.partition.d1(nb, x);
        return wedge(e1, uv);
      };
      corrections_.push_back(tabulate(bcfg, dphi_u, ovl, w_grid));
    }
  }

  int correction_count() const { return static_cast<int>(corrections_.size()); }

  // interpolated correction w_{k+1/2}, zero outside its overlap
  FormValue correction(int k, const Point& x) const {
    FormValue w(2, ell_);
    const auto& comp = corrections_[static_cast<std::size_t>(k)];
    for (int c = 0; c < w.components(); ++c) w[c] = comp[static_cast<std::size_t>(c)](x);
    return w;
  }

  double correction_max_abs(int k) const {
    double m = 0.0;
    const StarDomain& ovl = chain_.overlaps[static_cast<std::size_t>(k)];
    QuadratureNodes q = quadrature_nodes(ovl, 3);
    for (const Point& x : q.points) m = std::max(m, correction(k, x).max_abs());
    return m;
  }

  // v_i = B_l[phi_i u + w_{i+1/2} - w_{i-1/2}] evaluated at x
  FormValue link_field(int i, const Point& x) const {
    const StarDomain& link = chain_.links[static_cast<std::size_t>(i)];
    Mollifier mol = piece_mollifier(link, 0.9, 4);
    BogovskiiConfig bcfg(mol, link, ell_);
    bcfg.z_grid = z_grid_;
    bcfg.t_quad_order = t_quad_;
    auto arg = [this, i](const Point& y) { return argument(i, y); };
    return apply_bogovskii(bcfg, arg, x);
  }

  FormValue value(const Point& x) const {
    FormValue v(2, ell_ - 1);
    for (int i = 0; i < chain_.links_count; ++i) v += link_field(i, x);
    return v;
  }

  // d(v)(x) by finite differences of the link fields
  FormValue d_value(const Point& x, double h) const {
    FormValue out(2, ell_);
    for (int i = 0; i < chain_.links_count; ++i) {
      const StarDomain& link = chain_.links[static_cast<std::size_t>(i)];
      Mollifier mol = piece_mollifier(link, 0.9, 4);
      BogovskiiConfig bcfg(mol, link, ell_);
      bcfg.z_grid = z_grid_;
      bcfg.t_quad_order = t_quad_;
      auto arg = [this, i](const Point& y) { return argument(i, y); };
      out += bogovskii_d_fd(bcfg, arg, x, h);
    }
    return out;
  }

  // diagnostics -------------------------------------------------------------

  // trace functional of d(phi_{k+1} u) on overlap k: pairing against random
  // polynomials when ell + 1 < n, the volume integral of the top component
  // when ell + 1 = n
  double lemma_b_residual(int k, int psi_count, std::uint64_t seed, int quad_level = 4) const {
    const StarDomain& ovl = chain_.overlaps[static_cast<std::size_t>(k)];
    const int n = 2, nb = k + 1;
    auto dphi_u = [this, nb](const Point& x) {
      FormValue uv = u_.value(x);
      FormValue e1(2, 1);
      e1[IndexTuple{1}] = chain_.partition.d1(nb, x);
      return wedge(e1, uv);
    };
    if (ell_ + 1 == n) {
      QuadratureNodes q = quadrature_nodes(ovl, quad_level);
      double acc = 0.0;
      for (const Point& x : q.points) acc += dphi_u(x)[0];
      return std::abs(acc * q.weight);
    }
    FormField w;
    w.n = n;
    w.degree = ell_ + 1;
    w.value = dphi_u;
    w.d_value = [n, this](const Point&) { return FormValue(n, ell_ + 2); };  // d(dphi ^ u) = 0
    FieldSamples samples = sample_field(w, ovl, quad_level);
    Rng rng(seed);
    double worst = 0.0;
    for (int r = 0; r < psi_count; ++r) {
      PolyForm psi = random_form(n, n - ell_ - 2, 2, rng);
      worst = std::max(worst, std::abs(trace_pairing(samples, psi)));
    }
    return worst;
  }

 private:
  FormValue argument(int i, const Point& y) const {
    FormValue a(2, ell_);
    if (chain_.links[static_cast<std::size_t>(i)].contains(y)) {
      a = u_.value(y);
      a *= chain_.partition.value(i, y);
      if (i < correction_count()) a += correction(i, y);
      if (i - 1 >= 0) a -= correction(i - 1, y);
    }
    return a;
  }

  std::vector<detail::GridField2D> tabulate(
      const BogovskiiConfig& bcfg, const std::function<FormValue(const Point&)>& input,
      const StarDomain& ovl, int w_grid) {
    Point lo{}, hi{};
    ovl.bounding_box(lo, hi);
    double ext = std::max(hi[0] - lo[0], hi[1] - lo[1]);
    double h = ext / w_grid;
    // two cells of zero padding around the box
    int nx = static_cast<int>(std::ceil((hi[0] - lo[0]) / h)) + 5;
    int ny = static_cast<int>(std::ceil((hi[1] - lo[1]) / h)) + 5;
    Point glo = lo;
    glo[0] -= 2.5 * h;
    glo[1] -= 2.5 * h;
    int comps = basis_count(2, ell_);
    std::vector<std::vector<double>> vals(static_cast<std::size_t>(comps));
    for (auto& v : vals) v.assign(static_cast<std::size_t>(nx * ny), 0.0);
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        Point p{};
        p[0] = glo[0] + ix * h;
        p[1] = glo[1] + iy * h;
        if (!ovl.contains(p)) continue;
        FormValue w = apply_bogovskii(bcfg, input, p);
        for (int c = 0; c < comps; ++c)
          vals[static_cast<std::size_t>(c)][static_cast<std::size_t>(iy * nx + ix)] = w[c];
      }
    std::vector<detail::GridField2D> out;
    for (int c = 0; c < comps; ++c)
      out.emplace_back(glo, h, nx, ny, std::move(vals[static_cast<std::size_t>(c)]));
    return out;
  }

  const ChainDecomposition& chain_;
  FormField u_;
  int ell_ = 1;
  int z_grid_ = 32;
  int t_quad_ = 12;
  std::vector<std::vector<detail::GridField2D>> corrections_;
};

}  // namespace starforms

#endif
