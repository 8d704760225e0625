#ifndef STARFORMS_FIELDS_HPP
#define STARFORMS_FIELDS_HPP

#include <functional>
#include <utility>

#include "starforms/polyform.hpp"

namespace starforms {

// A differential form given by pointwise evaluation, together with its exterior
// derivative when one is available (symbolic, analytic, or finite-difference).
struct FormField {
  int n = 0;
  int degree = 0;
  std::function<FormValue(const Point&)> value;
  std::function<FormValue(const Point&)> d_value;  // degree + 1; empty when degree == n
};

namespace detail {

// flat term list for fast repeated evaluation inside quadrature loops
struct FlatPoly {
  int n = 0;
  std::vector<std::array<std::int8_t, kMaxDim>> expos;
  std::vector<double> coefs;

  FlatPoly() = default;
  explicit FlatPoly(const MultiPoly& p) : n(p.vars()) {
    for (const auto& [a, c] : p.terms()) {
      std::array<std::int8_t, kMaxDim> e{};
      for (int i = 0; i < kMaxDim; ++i) e[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(a[static_cast<std::size_t>(i)]);
      expos.push_back(e);
      coefs.push_back(c);
    }
  }

  double evaluate(const Point& x) const {
    double s = 0.0;
    for (std::size_t t = 0; t < coefs.size(); ++t) {
      double v = coefs[t];
      const auto& e = expos[t];
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) v *= x[static_cast<std::size_t>(i)];
      s += v;
    }
    return s;
  }
};

struct FlatForm {
  std::vector<FlatPoly> comp;

  FlatForm() = default;
  explicit FlatForm(const PolyForm& u) {
    for (int a = 0; a < u.components(); ++a) comp.emplace_back(u[a]);
  }
};

}  // namespace detail

inline FormField make_field(const PolyForm& u) {
  FormField f;
  f.n = u.dim();
  f.degree = u.degree();
  f.value = [u](const Point& x) { return evaluate(u, x); };
  if (u.degree() < u.dim()) {
    PolyForm du = exterior_derivative(u);
    f.d_value = [du](const Point& x) { return evaluate(du, x); };
  }
  return f;
}

// C-infinity window exp(-1/(1 - q)) with q = sum ((x_i - c_i)/a_i)^2, supported
// on the closed ellipsoid q <= 1.
struct BumpWindow {
  int n = 2;
  Point center{};
  Point semi_axes{};

  double q(const Point& x) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double w = (x[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)]) /
                 semi_axes[static_cast<std::size_t>(i)];
      s += w * w;
    }
    return s;
  }

  double value(const Point& x) const {
    double w = 1.0 - q(x);
    return (w > 1e-8) ? std::exp(-1.0 / w) : 0.0;
  }

  Point gradient(const Point& x) const {
    Point g{};
    double w = 1.0 - q(x);
    if (w <= 1e-8) return g;
    double v = std::exp(-1.0 / w);
    for (int i = 0; i < n; ++i) {
      double ai = semi_axes[static_cast<std::size_t>(i)];
      double dqdxi = 2.0 * (x[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)]) / (ai * ai);
      g[static_cast<std::size_t>(i)] = -v * dqdxi / (w * w);
    }
    return g;
  }
};

// w = window * p with polynomial p; value and dw = d(window) ^ p + window * dp
// are both analytic. Used to build compactly supported test forms u = dw.
// The wedges dx_j ^ p are precomputed so pointwise evaluation stays cheap
// inside quadrature loops.
class BumpForm {
 public:
  BumpForm(BumpWindow window, PolyForm p)
      : window_(std::move(window)), p_(std::move(p)), dp_valid_(p_.degree() < p_.dim()) {
    if (dp_valid_) {
      dp_ = exterior_derivative(p_);
      dp_flat_ = detail::FlatForm(dp_);
    }
    for (int j = 1; j <= p_.dim(); ++j) {
      PolyForm ej(p_.dim(), 1);
      ej[IndexTuple{j}] = MultiPoly::constant(p_.dim(), 1.0);
      dxj_wedge_p_.push_back(detail::FlatForm(wedge(ej, p_)));
    }
  }

  int dim() const { return p_.dim(); }
  int degree() const { return p_.degree(); }
  const BumpWindow& window() const { return window_; }

  FormValue value(const Point& x) const {
    FormValue v = evaluate(p_, x);
    return window_.value(x) * v;
  }

  // d(window * p), degree + 1
  FormValue d_value(const Point& x) const {
    const int n = p_.dim();
    FormValue out(n, p_.degree() + 1);
    if (window_.q(x) >= 1.0) return out;
    Point g = window_.gradient(x);
    for (int j = 0; j < n; ++j) {
      double gj = g[static_cast<std::size_t>(j)];
      if (gj == 0.0) continue;
      const detail::FlatForm& q = dxj_wedge_p_[static_cast<std::size_t>(j)];
      for (int c = 0; c < out.components(); ++c) out[c] += gj * q.comp[static_cast<std::size_t>(c)].evaluate(x);
    }
    if (dp_valid_) {
      double b = window_.value(x);
      for (int c = 0; c < out.components(); ++c)
        out[c] += b * dp_flat_.comp[static_cast<std::size_t>(c)].evaluate(x);
    }
    return out;
  }

  FormField as_field() const {
    FormField f;
    f.n = dim();
    f.degree = degree();
    BumpForm self = *this;
    f.value = [self](const Point& x) { return self.value(x); };
    f.d_value = [self](const Point& x) { return self.d_value(x); };
    return f;
  }

  // the field u = dw, which is closed; d_value returns the structural zero
  FormField derivative_field() const {
    FormField f;
    f.n = dim();
    f.degree = degree() + 1;
    BumpForm self = *this;
    f.value = [self](const Point& x) { return self.d_value(x); };
    if (f.degree < f.n) {
      int n = f.n, l = f.degree;
      f.d_value = [n, l](const Point&) { return FormValue(n, l + 1); };
    }
    return f;
  }

 private:
  BumpWindow window_;
  PolyForm p_;
  PolyForm dp_;
  bool dp_valid_;
  detail::FlatForm dp_flat_;
  std::vector<detail::FlatForm> dxj_wedge_p_;
};

}  // namespace starforms

#endif
