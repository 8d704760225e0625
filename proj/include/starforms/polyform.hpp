#ifndef STARFORMS_POLYFORM_HPP
#define STARFORMS_POLYFORM_HPP

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "starforms/exterior.hpp"
#include "starforms/multipoly.hpp"

namespace starforms {

// Differential l-form with multivariate-polynomial coefficients,
// u(x) = sum_I u_I(x) dx_I over the ordered-tuple basis.
class PolyForm {
 public:
  PolyForm() : n_(1), l_(0), comp_(1, MultiPoly(1)) {}

  PolyForm(int n, int l)
      : n_(n), l_(l), comp_(static_cast<std::size_t>(basis_count(n, l)), MultiPoly(n)) {}

  int dim() const { return n_; }
  int degree() const { return l_; }
  int components() const { return static_cast<int>(comp_.size()); }

  const MultiPoly& operator[](int a) const { return comp_[static_cast<std::size_t>(a)]; }
  MultiPoly& operator[](int a) { return comp_[static_cast<std::size_t>(a)]; }

  const MultiPoly& operator[](const IndexTuple& I) const { return comp_[static_cast<std::size_t>(rank(I))]; }
  MultiPoly& operator[](const IndexTuple& I) { return comp_[static_cast<std::size_t>(rank(I))]; }

  const IndexTuple& tuple(int a) const {
    return detail::basis_table(n_, l_).tuples[static_cast<std::size_t>(a)];
  }

  PolyForm& operator+=(const PolyForm& o) {
    require_same(o);
    for (int a = 0; a < components(); ++a) (*this)[a] += o[a];
    return *this;
  }
  PolyForm& operator-=(const PolyForm& o) {
    require_same(o);
    for (int a = 0; a < components(); ++a) (*this)[a] -= o[a];
    return *this;
  }
  PolyForm& operator*=(double s) {
    for (auto& p : comp_) p *= s;
    return *this;
  }
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend PolyForm operator*(double s, PolyForm a) { return a *= s; }

  int poly_degree() const {
    int d = kZeroPolyDegree;
    for (const auto& p : comp_) d = std::max(d, p.degree());
    return d;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& p : comp_) m = std::max(m, p.max_abs_coefficient());
    return m;
  }

  bool is_zero() const {
    for (const auto& p : comp_)
      if (!p.is_zero()) return false;
    return true;
  }

 private:
  int rank(const IndexTuple& I) const {
    if (I.size() != l_) throw std::invalid_argument("PolyForm: IndexTuple degree mismatch");
    return detail::basis_table(n_, l_).rank_of(I);
  }
  void require_same(const PolyForm& o) const {
    if (n_ != o.n_ || l_ != o.l_) throw std::invalid_argument("PolyForm shape mismatch");
  }

  int n_, l_;
  std::vector<MultiPoly> comp_;
};

inline FormValue evaluate(const PolyForm& u, const Point& x) {
  FormValue v(u.dim(), u.degree());
  for (int a = 0; a < u.components(); ++a) v[a] = u[a].evaluate(x);
  return v;
}

// Exact symbolic exterior derivative. Requires degree < n.
inline PolyForm exterior_derivative(const PolyForm& u) {
  const int n = u.dim(), l = u.degree();
  if (l >= n) throw std::invalid_argument("exterior_derivative: degree already n");
  PolyForm out(n, l + 1);
  for (int a = 0; a < u.components(); ++a) {
    const IndexTuple& I = u.tuple(a);
    for (int j = 1; j <= n; ++j) {
      if (I.contains(j)) continue;
      MultiPoly dp = u[a].derivative(j - 1);
      if (dp.is_zero()) continue;
      int below = 0;
      for (int m = 0; m < I.size(); ++m)
        if (I[m] < j) ++below;
      std::vector<int> seq{j};
      for (int m = 0; m < I.size(); ++m) seq.push_back(I[m]);
      std::sort(seq.begin(), seq.end());
      IndexTuple J;
      for (int i : seq) J.push_back(i);
      double sgn = (below % 2 == 0) ? 1.0 : -1.0;
      out[J] += sgn * dp;
    }
  }
  return out;
}

inline PolyForm wedge(const PolyForm& a, const PolyForm& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  const int n = a.dim();
  if (a.degree() + b.degree() > n) throw std::invalid_argument("wedge: degree overflow");
  PolyForm out(n, a.degree() + b.degree());
  for (int ia = 0; ia < a.components(); ++ia) {
    if (a[ia].is_zero()) continue;
    const IndexTuple& I = a.tuple(ia);
    for (int ib = 0; ib < b.components(); ++ib) {
      if (b[ib].is_zero()) continue;
      const IndexTuple& J = b.tuple(ib);
      bool overlap = false;
      std::vector<int> seq;
      for (int m = 0; m < I.size(); ++m) seq.push_back(I[m]);
      for (int m = 0; m < J.size(); ++m) {
        if (I.contains(J[m])) {
          overlap = true;
          break;
        }
        seq.push_back(J[m]);
      }
      if (overlap) continue;
      double sgn = permutation_sign(seq);
      std::sort(seq.begin(), seq.end());
      IndexTuple K;
      for (int i : seq) K.push_back(i);
      out[K] += sgn * (a[ia] * b[ib]);
    }
  }
  return out;
}

inline PolyForm multiply(const MultiPoly& f, const PolyForm& u) {
  PolyForm out(u.dim(), u.degree());
  for (int a = 0; a < u.components(); ++a) out[a] = f * u[a];
  return out;
}

// Pseudorandom l-form with coefficients uniform in [-1, 1], total degree <= d.
inline PolyForm random_form(int n, int l, int d, Rng& rng) {
  PolyForm u(n, l);
  std::vector<Expo> expos;
  std::function<void(Expo, int, int)> rec = [&](Expo e, int var, int left) {
    if (var == n) {
      expos.push_back(e);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      Expo e2 = e;
      e2[static_cast<std::size_t>(var)] = k;
      rec(e2, var + 1, left - k);
    }
  };
  rec(Expo{}, 0, d);
  for (int a = 0; a < u.components(); ++a)
    for (const Expo& e : expos) u[a].add_term(e, rng.uniform(-1.0, 1.0));
  for (int a = 0; a < u.components(); ++a) u[a].normalize();
  return u;
}

// d(w) for a pseudorandom (l-1)-form w of degree d+1; exactly closed by d^2 = 0.
inline PolyForm random_closed_form(int n, int l, int d, std::uint64_t seed) {
  if (l < 1 || l > n) throw std::invalid_argument("random_closed_form: need 1 <= l <= n");
  Rng rng(seed);
  PolyForm w = random_form(n, l - 1, d + 1, rng);
  return exterior_derivative(w);
}

// --- plain-text serialization -------------------------------------------------
// One line per stored coefficient: "l; I=(i1,...,il); alpha=(a1,...,an); coeff".

inline std::string to_text(const PolyForm& u) {
  std::ostringstream os;
  char buf[64];
  for (int a = 0; a < u.components(); ++a) {
    const IndexTuple& I = u.tuple(a);
    for (const auto& [e, c] : u[a].terms()) {
      os << u.degree() << "; I=(";
      for (int m = 0; m < I.size(); ++m) os << (m ? "," : "") << I[m];
      os << "); alpha=(";
      for (int i = 0; i < u.dim(); ++i) os << (i ? "," : "") << e[static_cast<std::size_t>(i)];
      std::snprintf(buf, sizeof buf, "%.17g", c);
      os << "); " << buf << "\n";
    }
  }
  return os.str();
}

inline PolyForm parse_polyform(const std::string& text, int n) {
  std::istringstream is(text);
  std::string line;
  int l = -1;
  std::vector<std::tuple<IndexTuple, Expo, double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int deg;
    char ch;
    ls >> deg >> ch;  // "l;"
    if (!ls) throw std::invalid_argument("parse_polyform: bad line: " + line);
    if (l < 0) l = deg;
    if (deg != l) throw std::invalid_argument("parse_polyform: mixed degrees");
    auto expect = [&](const char* tok) {
      std::string s;
      ls >> s;
      if (s.rfind(tok, 0) != 0) throw std::invalid_argument("parse_polyform: expected " + std::string(tok));
      return s;
    };
    std::string itok = expect("I=(");
    IndexTuple I;
    {
      std::string body = itok.substr(3, itok.find(')') - 3);
      std::istringstream bs(body);
      std::string piece;
      while (std::getline(bs, piece, ','))
        if (!piece.empty()) I.push_back(std::stoi(piece));
    }
    std::string atok = expect("alpha=(");
    Expo e{};
    {
      std::string body = atok.substr(7, atok.find(')') - 7);
      std::istringstream bs(body);
      std::string piece;
      int i = 0;
      while (std::getline(bs, piece, ','))
        if (!piece.empty()) e[static_cast<std::size_t>(i++)] = std::stoi(piece);
    }
    double c;
    ls >> c;
    rows.emplace_back(I, e, c);
  }
  if (l < 0) throw std::invalid_argument("parse_polyform: empty input");
  PolyForm u(n, l);
  for (const auto& [I, e, c] : rows) u[I].add_term(e, c);
  for (int a = 0; a < u.components(); ++a) u[a].normalize();
  return u;
}

}  // namespace starforms

#endif
