#ifndef STARFORMS_COMMON_HPP
#define STARFORMS_COMMON_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace starforms {

// Largest ambient dimension the dense basis tables are sized for.
inline constexpr int kMaxDim = 6;

// A point of R^n, n <= kMaxDim. Unused trailing entries are zero.
using Point = std::array<double, kMaxDim>;

inline Point make_point(std::initializer_list<double> xs) {
  Point p{};
  int i = 0;
  for (double v : xs) p[static_cast<std::size_t>(i++)] = v;
  return p;
}

inline double dot(const Point& a, const Point& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
  return s;
}

inline double norm(const Point& a, int n) { return std::sqrt(dot(a, a, n)); }

inline double dist(const Point& a, const Point& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
    s += d * d;
  }
  return std::sqrt(s);
}

inline void check_dim(int n) {
  if (n < 1 || n > kMaxDim)
    throw std::invalid_argument("ambient dimension must be in [1, " + std::to_string(kMaxDim) +
                                "], got " + std::to_string(n));
}

// Deterministic, platform-independent generator (splitmix64). All randomized
// machinery in the library derives its draws from explicit seeds through this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // a sub-stream seed for work item `index`, independent of draw order
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return r.next();
  }

 private:
  std::uint64_t state_;
};

}  // namespace starforms

#endif
