#pragma once

// Second-order forward-mode automatic differentiation.
//
// A Jet carries a value together with its gradient and Hessian with respect
// to a fixed set of independent variables (at most kMaxVars). Arithmetic
// propagates all three exactly, so evaluating a closed-form function on
// seeded Jets yields exact first and second derivatives.

#include <cmath>

#include <Eigen/Dense>

namespace wulfflab::detail {

inline constexpr int kMaxVars = 8;

using JetVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxVars, 1>;
using JetMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxVars, kMaxVars>;

struct Jet {
  double v = 0.0;
  JetVec g;
  JetMat h;

  Jet() = default;
  Jet(double value, int nvars) : v(value), g(JetVec::Zero(nvars)), h(JetMat::Zero(nvars, nvars)) {}

  static Jet variable(double value, int index, int nvars) {
    Jet j(value, nvars);
    j.g[index] = 1.0;
    return j;
  }

  int size() const { return static_cast<int>(g.size()); }
};

// Chain rule for a scalar function with derivatives d1, d2 at a.v.
inline Jet apply(const Jet& a, double value, double d1, double d2) {
  Jet r;
  r.v = value;
  r.g = d1 * a.g;
  r.h = d1 * a.h + d2 * (a.g * a.g.transpose());
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v + b.v;
  r.g = a.g + b.g;
  r.h = a.h + b.h;
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v - b.v;
  r.g = a.g - b.g;
  r.h = a.h - b.h;
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r;
  r.v = -a.v;
  r.g = -a.g;
  r.h = -a.h;
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  const JetMat outer = a.g * b.g.transpose();
  r.h = a.v * b.h + b.v * a.h + outer + outer.transpose();
  return r;
}

inline Jet operator+(const Jet& a, double c) {
  Jet r = a;
  r.v += c;
  return r;
}
inline Jet operator+(double c, const Jet& a) { return a + c; }
inline Jet operator-(const Jet& a, double c) { return a + (-c); }
inline Jet operator-(double c, const Jet& a) { return (-a) + c; }

inline Jet operator*(const Jet& a, double c) {
  Jet r;
  r.v = a.v * c;
  r.g = a.g * c;
  r.h = a.h * c;
  return r;
}
inline Jet operator*(double c, const Jet& a) { return a * c; }

inline Jet reciprocal(const Jet& a) {
  const double inv = 1.0 / a.v;
  return apply(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double c) { return a * (1.0 / c); }
inline Jet operator/(double c, const Jet& a) { return c * reciprocal(a); }

inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return apply(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Jet atan2(const Jet& y, const Jet& x) {
  const double r2 = x.v * x.v + y.v * y.v;
  const double fy = x.v / r2;
  const double fx = -y.v / r2;
  const double fyy = -2.0 * x.v * y.v / (r2 * r2);
  const double fxx = -fyy;
  const double fxy = (y.v * y.v - x.v * x.v) / (r2 * r2);
  Jet r;
  r.v = std::atan2(y.v, x.v);
  r.g = fy * y.g + fx * x.g;
  const JetMat yy = y.g * y.g.transpose();
  const JetMat xx = x.g * x.g.transpose();
  const JetMat xy = x.g * y.g.transpose();
  r.h = fy * y.h + fx * x.h + fyy * yy + fxx * xx + fxy * (xy + xy.transpose());
  return r;
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

}  // namespace wulfflab::detail
