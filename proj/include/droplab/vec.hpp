#pragma once

#include <array>
#include <cmath>

namespace droplab {

/// Point or vector in R^N for N <= 3; unused trailing components stay zero.
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  constexpr Vec() = default;
  constexpr Vec(double x, double y, double z = 0.0) : c{x, y, z} {}

  constexpr double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  constexpr double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < 3; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < 3; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double a) {
    for (auto& x : c) x *= a;
    return *this;
  }
  friend bool operator==(const Vec&, const Vec&) = default;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator-(Vec a) { return a *= -1.0; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator*(double s, Vec a) { return a *= s; }

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec unit(int axis) {
  Vec e;
  e[axis] = 1.0;
  return e;
}

}  // namespace droplab
