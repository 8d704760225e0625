#ifndef STARFORMS_MULTIPOLY_HPP
#define STARFORMS_MULTIPOLY_HPP

#include <limits>
#include <map>
#include <vector>

#include "starforms/common.hpp"

namespace starforms {

// Exponent multi-index; entries beyond the variable count stay zero.
using Expo = std::array<int, kMaxDim>;

inline int expo_degree(const Expo& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

// degree() of the zero polynomial
inline constexpr int kZeroPolyDegree = std::numeric_limits<int>::min();

// Multivariate polynomial with real coefficients over a fixed number of variables.
// Terms with |coefficient| <= kDropTol are removed on normalization so that
// structural zeros (d^2 = 0, closedness) are distinguishable from roundoff.
class MultiPoly {
 public:
  static constexpr double kDropTol = 1e-14;

  explicit MultiPoly(int n = 1) : n_(n) { check_dim(n); }

  static MultiPoly constant(int n, double c) {
    MultiPoly p(n);
    if (c != 0.0) p.terms_[Expo{}] = c;
    return p;
  }

  static MultiPoly monomial(int n, const Expo& a, double c) {
    MultiPoly p(n);
    for (int i = n; i < kMaxDim; ++i)
      if (a[static_cast<std::size_t>(i)] != 0)
        throw std::invalid_argument("monomial: exponent beyond variable count");
    if (c != 0.0) p.terms_[a] = c;
    return p;
  }

  // x_j, 0-based
  static MultiPoly variable(int n, int j) {
    Expo a{};
    a[static_cast<std::size_t>(j)] = 1;
    return monomial(n, a, 1.0);
  }

  int vars() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Expo, double>& terms() const { return terms_; }

  int degree() const {
    if (terms_.empty()) return kZeroPolyDegree;
    int d = 0;
    for (const auto& [a, c] : terms_) d = std::max(d, expo_degree(a));
    return d;
  }

  double coefficient(const Expo& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? 0.0 : it->second;
  }

  void add_term(const Expo& a, double c) {
    auto [it, fresh] = terms_.emplace(a, c);
    if (!fresh) it->second += c;
  }

  MultiPoly& normalize() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = (std::abs(it->second) <= kDropTol) ? terms_.erase(it) : std::next(it);
    return *this;
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    require_same(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    normalize();
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    require_same(o);
    for (const auto& [a, c] : o.terms_) add_term(a, -c);
    normalize();
    return *this;
  }
  MultiPoly& operator*=(double s) {
    for (auto& [a, c] : terms_) c *= s;
    normalize();
    return *this;
  }

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(double s, MultiPoly a) { return a *= s; }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.require_same(b);
    MultiPoly r(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Expo e{};
        for (int i = 0; i < kMaxDim; ++i)
          e[static_cast<std::size_t>(i)] =
              ea[static_cast<std::size_t>(i)] + eb[static_cast<std::size_t>(i)];
        r.add_term(e, ca * cb);
      }
    r.normalize();
    return r;
  }

  // d/dx_j, 0-based
  MultiPoly derivative(int j) const {
    MultiPoly r(n_);
    for (const auto& [a, c] : terms_) {
      int e = a[static_cast<std::size_t>(j)];
      if (e == 0) continue;
      Expo b = a;
      b[static_cast<std::size_t>(j)] = e - 1;
      r.add_term(b, c * e);
    }
    r.normalize();
    return r;
  }

  double evaluate(const Point& x) const {
    double s = 0.0;
    for (const auto& [a, c] : terms_) {
      double t = c;
      for (int i = 0; i < n_; ++i) {
        double xi = x[static_cast<std::size_t>(i)];
        for (int e = 0; e < a[static_cast<std::size_t>(i)]; ++e) t *= xi;
      }
      s += t;
    }
    return s;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [a, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  void require_same(const MultiPoly& o) const {
    if (n_ != o.n_) throw std::invalid_argument("MultiPoly: variable count mismatch");
  }

  int n_;
  std::map<Expo, double> terms_;
};

}  // namespace starforms

#endif
