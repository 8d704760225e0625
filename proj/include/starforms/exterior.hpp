#ifndef STARFORMS_EXTERIOR_HPP
#define STARFORMS_EXTERIOR_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <vector>

#include "starforms/common.hpp"

namespace starforms {

// Strictly increasing tuple of indices in [1, n]; the label of a basis form e^I.
class IndexTuple {
 public:
  IndexTuple() : len_(0) { v_.fill(0); }

  IndexTuple(std::initializer_list<int> idx) : len_(0) {
    v_.fill(0);
    for (int i : idx) push_back(i);
  }

  static IndexTuple full(int n) {
    IndexTuple t;
    for (int i = 1; i <= n; ++i) t.push_back(i);
    return t;
  }

  void push_back(int i) {
    if (len_ == kMaxDim) throw std::invalid_argument("IndexTuple: too many indices");
    if (len_ > 0 && i <= v_[static_cast<std::size_t>(len_ - 1)])
      throw std::invalid_argument("IndexTuple: indices must be strictly increasing");
    if (i < 1 || i > kMaxDim) throw std::invalid_argument("IndexTuple: index out of range");
    v_[static_cast<std::size_t>(len_++)] = static_cast<std::uint8_t>(i);
  }

  int size() const { return len_; }
  int operator[](int m) const { return v_[static_cast<std::size_t>(m)]; }

  bool contains(int i) const {
    for (int m = 0; m < len_; ++m)
      if ((*this)[m] == i) return true;
    return false;
  }

  // suppression: drop the entry at position m (0-based); the paper's I with index m removed
  IndexTuple drop(int m) const {
    IndexTuple t;
    for (int j = 0; j < len_; ++j)
      if (j != m) t.push_back((*this)[j]);
    return t;
  }

  IndexTuple complement(int n) const {
    IndexTuple t;
    for (int i = 1; i <= n; ++i)
      if (!contains(i)) t.push_back(i);
    return t;
  }

  bool operator==(const IndexTuple& o) const { return len_ == o.len_ && v_ == o.v_; }
  bool operator<(const IndexTuple& o) const {
    if (len_ != o.len_) return len_ < o.len_;
    return v_ < o.v_;
  }

 private:
  std::array<std::uint8_t, kMaxDim> v_;
  int len_;
};

inline std::ostream& operator<<(std::ostream& os, const IndexTuple& t) {
  os << '(';
  for (int m = 0; m < t.size(); ++m) os << (m ? "," : "") << t[m];
  return os << ')';
}

// Parity sign of the permutation that sorts `seq`: +1 even, -1 odd.
inline int permutation_sign(const std::vector<int>& seq) {
  int inv = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

// (-1)^{sigma(I)}: sign of the permutation [I, I^c] of (1..n).
inline int hodge_sign(const IndexTuple& I, int n) {
  std::vector<int> seq;
  for (int m = 0; m < I.size(); ++m) seq.push_back(I[m]);
  IndexTuple c = I.complement(n);
  for (int m = 0; m < c.size(); ++m) seq.push_back(c[m]);
  return permutation_sign(seq);
}

namespace detail {

struct ContractionEntry {
  int src;     // component index in the degree-l basis
  int var;     // 0-based coordinate of the contracted vector
  int dst;     // component index in the degree-(l-1) basis
  double sgn;  // (-1)^(m-1)
};

struct BasisTable {
  int n = 0, l = 0;
  std::vector<IndexTuple> tuples;
  std::vector<ContractionEntry> contraction;  // empty when l == 0

  int rank_of(const IndexTuple& t) const {
    for (std::size_t i = 0; i < tuples.size(); ++i)
      if (tuples[i] == t) return static_cast<int>(i);
    throw std::invalid_argument("IndexTuple not in basis");
  }
};

inline void enumerate_tuples(int n, int l, int start, IndexTuple cur, std::vector<IndexTuple>& out) {
  if (cur.size() == l) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i <= n; ++i) {
    IndexTuple next = cur;
    next.push_back(i);
    enumerate_tuples(n, l, i + 1, next, out);
  }
}

inline const BasisTable& basis_table(int n, int l) {
  // grows once per (n, l); the atomic pointer keeps the hot lookup lock-free
  static std::atomic<const BasisTable*> slots[kMaxDim + 1][kMaxDim + 1] = {};
  check_dim(n);
  if (l < 0 || l > n) throw std::invalid_argument("form degree out of [0, n]");
  const BasisTable* hit = slots[n][l].load(std::memory_order_acquire);
  if (hit) return *hit;

  static std::recursive_mutex mtx;
  std::lock_guard<std::recursive_mutex> lock(mtx);
  hit = slots[n][l].load(std::memory_order_acquire);
  if (hit) return *hit;

  auto tab = std::make_unique<BasisTable>();
  tab->n = n;
  tab->l = l;
  if (l == 0) {
    tab->tuples.push_back(IndexTuple{});
  } else {
    enumerate_tuples(n, l, 1, IndexTuple{}, tab->tuples);
  }
  if (l >= 1) {
    const BasisTable& lower = basis_table(n, l - 1);
    for (std::size_t a = 0; a < tab->tuples.size(); ++a) {
      const IndexTuple& I = tab->tuples[a];
      for (int m = 0; m < l; ++m) {
        ContractionEntry e;
        e.src = static_cast<int>(a);
        e.var = I[m] - 1;
        e.dst = lower.rank_of(I.drop(m));
        e.sgn = (m % 2 == 0) ? 1.0 : -1.0;
        tab->contraction.push_back(e);
      }
    }
  }
  const BasisTable* fresh = tab.release();  // lives for the program's duration
  slots[n][l].store(fresh, std::memory_order_release);
  return *fresh;
}

}  // namespace detail

inline int basis_count(int n, int l) {
  return static_cast<int>(detail::basis_table(n, l).tuples.size());
}

inline const std::vector<IndexTuple>& basis_tuples(int n, int l) {
  return detail::basis_table(n, l).tuples;
}

// An element of Lambda^l over R^n, dense over the ordered-tuple basis.
class FormValue {
 public:
  FormValue() : n_(1), l_(0), c_(1, 0.0) {}

  FormValue(int n, int l) : n_(n), l_(l), c_(static_cast<std::size_t>(basis_count(n, l)), 0.0) {}

  static FormValue basis(int n, const IndexTuple& I) {
    FormValue f(n, I.size());
    f[I] = 1.0;
    return f;
  }

  int dim() const { return n_; }
  int degree() const { return l_; }
  int components() const { return static_cast<int>(c_.size()); }

  double operator[](int a) const { return c_[static_cast<std::size_t>(a)]; }
  double& operator[](int a) { return c_[static_cast<std::size_t>(a)]; }

  double operator[](const IndexTuple& I) const { return c_[static_cast<std::size_t>(rank(I))]; }
  double& operator[](const IndexTuple& I) { return c_[static_cast<std::size_t>(rank(I))]; }

  const IndexTuple& tuple(int a) const { return detail::basis_table(n_, l_).tuples[static_cast<std::size_t>(a)]; }

  FormValue& operator+=(const FormValue& o) {
    require_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  FormValue& operator-=(const FormValue& o) {
    require_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  FormValue& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }

  friend FormValue operator+(FormValue a, const FormValue& b) { return a += b; }
  friend FormValue operator-(FormValue a, const FormValue& b) { return a -= b; }
  friend FormValue operator*(double s, FormValue a) { return a *= s; }

  double max_abs() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  int rank(const IndexTuple& I) const {
    if (I.size() != l_) throw std::invalid_argument("IndexTuple degree mismatch");
    return detail::basis_table(n_, l_).rank_of(I);
  }
  void require_same(const FormValue& o) const {
    if (n_ != o.n_ || l_ != o.l_) throw std::invalid_argument("FormValue shape mismatch");
  }

  int n_, l_;
  std::vector<double> c_;
};

// Exterior product. Throws if the degrees overflow the ambient dimension.
inline FormValue wedge(const FormValue& a, const FormValue& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  const int n = a.dim();
  const int l = a.degree(), k = b.degree();
  if (l + k > n) throw std::invalid_argument("wedge: degree overflow (l + k > n)");
  FormValue out(n, l + k);
  for (int ia = 0; ia < a.components(); ++ia) {
    if (a[ia] == 0.0) continue;
    const IndexTuple& I = a.tuple(ia);
    for (int ib = 0; ib < b.components(); ++ib) {
      if (b[ib] == 0.0) continue;
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
      int sgn = permutation_sign(seq);
      std::sort(seq.begin(), seq.end());
      IndexTuple K;
      for (int i : seq) K.push_back(i);
      out[K] += sgn * a[ia] * b[ib];
    }
  }
  return out;
}

// Hodge star: e^I -> (-1)^{sigma(I)} e^{I^c}.
inline FormValue hodge_star(const FormValue& a) {
  const int n = a.dim();
  FormValue out(n, n - a.degree());
  for (int ia = 0; ia < a.components(); ++ia) {
    if (a[ia] == 0.0) continue;
    const IndexTuple& I = a.tuple(ia);
    double sgn = hodge_sign(I, n);
    out[I.complement(n)] += sgn * a[ia];
  }
  return out;
}

// Interior product z -| a. Requires degree >= 1.
inline FormValue contract(const Point& z, const FormValue& a) {
  if (a.degree() < 1) throw std::invalid_argument("contract: cannot contract a 0-form");
  FormValue out(a.dim(), a.degree() - 1);
  const auto& tab = detail::basis_table(a.dim(), a.degree());
  for (const auto& e : tab.contraction) {
    out[e.dst] += e.sgn * z[static_cast<std::size_t>(e.var)] * a[e.src];
  }
  return out;
}

// Allocation-free contraction into a preallocated output (hot quadrature loops).
inline void contract_into(const Point& z, const FormValue& a, FormValue& out) {
  for (int i = 0; i < out.components(); ++i) out[i] = 0.0;
  const auto& tab = detail::basis_table(a.dim(), a.degree());
  for (const auto& e : tab.contraction)
    out[e.dst] += e.sgn * z[static_cast<std::size_t>(e.var)] * a[e.src];
}

// Euclidean inner product with e^I orthonormal.
inline double inner_product(const FormValue& a, const FormValue& b) {
  if (a.dim() != b.dim() || a.degree() != b.degree())
    throw std::invalid_argument("inner_product: degree mismatch");
  double s = 0.0;
  for (int i = 0; i < a.components(); ++i) s += a[i] * b[i];
  return s;
}

// Coefficient of e^{1...n} in a ^ b for complementary degrees; the volume-form
// weight used by the trace pairing.
inline double top_wedge_coefficient(const FormValue& a, const FormValue& b) {
  const int n = a.dim();
  if (a.degree() + b.degree() != n) throw std::invalid_argument("top_wedge: degrees must sum to n");
  double s = 0.0;
  for (int ia = 0; ia < a.components(); ++ia) {
    if (a[ia] == 0.0) continue;
    const IndexTuple& I = a.tuple(ia);
    IndexTuple c = I.complement(n);
    s += hodge_sign(I, n) * a[ia] * b[c];
  }
  return s;
}

}  // namespace starforms

#endif
