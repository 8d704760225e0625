#ifndef STARFORMS_NORMS_HPP
#define STARFORMS_NORMS_HPP

#include "starforms/fields.hpp"
#include "starforms/geometry.hpp"

namespace starforms {

// Sobolev seminorm |u|_{H^k(Omega)} for k in {0, 1, 2}: derivatives symbolic,
// then midpoint quadrature over the domain. k = 0 is the L^2 norm.
inline double sobolev_seminorm(const PolyForm& u, int k, const StarDomain& dom, int quad_level) {
  if (k < 0 || k > 2) throw std::invalid_argument("sobolev_seminorm: k in {0, 1, 2}");
  const int n = u.dim();
  std::vector<MultiPoly> pieces;
  for (int a = 0; a < u.components(); ++a) {
    if (k == 0) {
      pieces.push_back(u[a]);
    } else if (k == 1) {
      for (int j = 0; j < n; ++j) pieces.push_back(u[a].derivative(j));
    } else {
      for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) pieces.push_back(u[a].derivative(j).derivative(i));
    }
  }
  QuadratureNodes q = quadrature_nodes(dom, quad_level);
  if (q.points.empty()) throw std::runtime_error("sobolev_seminorm: empty quadrature");
  double acc = 0.0;
  for (const MultiPoly& p : pieces) {
    if (p.is_zero()) continue;
    double s = 0.0;
    for (const Point& x : q.points) {
      double v = p.evaluate(x);
      s += v * v;
    }
    acc += s;
  }
  return std::sqrt(acc * q.weight);
}

inline double l2_norm(const PolyForm& u, const StarDomain& dom, int quad_level) {
  return sobolev_seminorm(u, 0, dom, quad_level);
}

// Pointwise samples of a form field over a node set; lets several pairings or
// norms reuse one (possibly expensive) sweep of evaluations.
struct FieldSamples {
  int n = 0;
  int degree = 0;
  QuadratureNodes nodes;
  std::vector<FormValue> value;
  std::vector<FormValue> d_value;
};

inline FieldSamples sample_field(const FormField& u, const StarDomain& dom, int quad_level) {
  FieldSamples s;
  s.n = u.n;
  s.degree = u.degree;
  s.nodes = quadrature_nodes(dom, quad_level);
  if (s.nodes.points.empty()) throw std::runtime_error("sample_field: empty quadrature");
  s.value.reserve(s.nodes.points.size());
  if (u.d_value) s.d_value.reserve(s.nodes.points.size());
  for (const Point& x : s.nodes.points) {
    s.value.push_back(u.value(x));
    if (u.d_value) s.d_value.push_back(u.d_value(x));
  }
  return s;
}

// Weak trace pairing <tr u, psi> = int_Omega du ^ psi + (-1)^l int_Omega u ^ d psi,
// evaluated by domain quadrature; no boundary mesh involved.
inline double trace_pairing(const FieldSamples& u, const PolyForm& psi) {
  const int n = u.n, l = u.degree;
  if (psi.degree() != n - l - 1)
    throw std::invalid_argument("trace_pairing: psi must have degree n - l - 1");
  if (u.d_value.empty()) throw std::invalid_argument("trace_pairing: field carries no derivative");
  PolyForm dpsi = exterior_derivative(psi);
  double sgn = (l % 2 == 0) ? 1.0 : -1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < u.nodes.points.size(); ++i) {
    const Point& x = u.nodes.points[i];
    acc += top_wedge_coefficient(u.d_value[i], evaluate(psi, x));
    acc += sgn * top_wedge_coefficient(u.value[i], evaluate(dpsi, x));
  }
  return acc * u.nodes.weight;
}

inline double trace_pairing(const FormField& u, const PolyForm& psi, const StarDomain& dom,
                            int quad_level) {
  return trace_pairing(sample_field(u, dom, quad_level), psi);
}

inline double trace_pairing(const PolyForm& u, const PolyForm& psi, const StarDomain& dom,
                            int quad_level) {
  return trace_pairing(make_field(u), psi, dom, quad_level);
}

}  // namespace starforms

#endif
