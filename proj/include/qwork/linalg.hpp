#pragma once

#include <array>
#include <cmath>

// Minimal fixed-size linear algebra for the 4-component real vectorization
// of a two-level density matrix. Everything lives on the stack.

namespace qwork {

struct Vec4 {
  std::array<double, 4> d{};

  double& operator[](int i) { return d[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return d[static_cast<std::size_t>(i)]; }
};

struct Mat4 {
  // row-major
  std::array<double, 16> d{};

  double& operator()(int r, int c) { return d[static_cast<std::size_t>(4 * r + c)]; }
  double operator()(int r, int c) const { return d[static_cast<std::size_t>(4 * r + c)]; }

  static Mat4 identity() {
    Mat4 m;
    m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = 1.0;
    return m;
  }
};

inline Vec4 operator*(const Mat4& m, const Vec4& x) {
  Vec4 r;
  for (int i = 0; i < 4; ++i) {
    r[i] = m(i, 0) * x[0] + m(i, 1) * x[1] + m(i, 2) * x[2] + m(i, 3) * x[3];
  }
  return r;
}

inline Mat4 operator*(const Mat4& a, const Mat4& b) {
  Mat4 r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j) + a(i, 3) * b(3, j);
    }
  }
  return r;
}

inline Mat4 operator+(const Mat4& a, const Mat4& b) {
  Mat4 r;
  for (int i = 0; i < 16; ++i) r.d[static_cast<std::size_t>(i)] = a.d[static_cast<std::size_t>(i)] + b.d[static_cast<std::size_t>(i)];
  return r;
}

inline Mat4 operator-(const Mat4& a, const Mat4& b) {
  Mat4 r;
  for (int i = 0; i < 16; ++i) r.d[static_cast<std::size_t>(i)] = a.d[static_cast<std::size_t>(i)] - b.d[static_cast<std::size_t>(i)];
  return r;
}

inline Mat4 operator*(double s, const Mat4& a) {
  Mat4 r;
  for (int i = 0; i < 16; ++i) r.d[static_cast<std::size_t>(i)] = s * a.d[static_cast<std::size_t>(i)];
  return r;
}

inline Vec4 operator*(double s, const Vec4& x) {
  return Vec4{{s * x[0], s * x[1], s * x[2], s * x[3]}};
}

inline Vec4 operator+(const Vec4& a, const Vec4& b) {
  return Vec4{{a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}};
}

inline Vec4 operator-(const Vec4& a, const Vec4& b) {
  return Vec4{{a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}};
}

// w = A^T x without materializing the transpose
inline Vec4 transpose_apply(const Mat4& m, const Vec4& x) {
  Vec4 r;
  for (int j = 0; j < 4; ++j) {
    r[j] = m(0, j) * x[0] + m(1, j) * x[1] + m(2, j) * x[2] + m(3, j) * x[3];
  }
  return r;
}

inline double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// w^T M z
inline double bilinear(const Vec4& w, const Mat4& m, const Vec4& z) {
  return dot(w, m * z);
}

inline double max_abs(const Mat4& m) {
  double r = 0.0;
  for (double v : m.d) r = std::max(r, std::fabs(v));
  return r;
}

inline double max_abs(const Vec4& x) {
  double r = 0.0;
  for (double v : x.d) r = std::max(r, std::fabs(v));
  return r;
}

inline bool all_finite(const Vec4& x) {
  return std::isfinite(x[0] + x[1] + x[2] + x[3]);
}

}  // namespace qwork
