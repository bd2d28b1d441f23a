#pragma once

// Double-double arithmetic, used only by the test suite to produce reference
// values independently of the library under test. ~32 significant digits,
// enough headroom to certify the production routines at 1e-13.

#include <cmath>

namespace ddo {

struct dd {
  double hi = 0.0;
  double lo = 0.0;
};

inline dd make(double x) { return {x, 0.0}; }
inline double to_double(dd a) { return a.hi + a.lo; }

// requires |a| >= |b| or a == 0
inline dd quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_sum(double a, double b) {
  const double s = a + b;
  const double v = s - a;
  return {s, (a - (s - v)) + (b - v)};
}

inline dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd operator+(dd a, dd b) {
  const dd s = two_sum(a.hi, b.hi);
  return quick_two_sum(s.hi, s.lo + a.lo + b.lo);
}
inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }
inline dd operator*(dd a, dd b) {
  const dd p = two_prod(a.hi, b.hi);
  return quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}
inline dd operator/(dd a, dd b) {
  const double q1 = a.hi / b.hi;
  dd r = a - make(q1) * b;
  const double q2 = r.hi / b.hi;
  r = r - make(q2) * b;
  const double q3 = r.hi / b.hi;
  return quick_two_sum(q1, q2) + make(q3);
}
inline dd operator+(dd a, double b) { return a + make(b); }
inline dd operator-(dd a, double b) { return a - make(b); }
inline dd operator*(dd a, double b) { return a * make(b); }
inline dd operator/(dd a, double b) { return a / make(b); }

inline const dd kPi{3.141592653589793, 1.2246467991473532e-16};
inline const dd kGamma{0.5772156649015329, -4.942915152430645e-18};
inline const dd kLn2{0.6931471805599453, 2.3190468138462996e-17};

// ln(x), x > 0: scale the mantissa into [sqrt(1/2), sqrt(2)) and sum the
// atanh series 2 * (t + t^3/3 + ...) with t = (m-1)/(m+1).
inline dd dd_log(dd x) {
  int e = 0;
  std::frexp(x.hi, &e);
  dd m{std::ldexp(x.hi, -e), std::ldexp(x.lo, -e)};
  if (m.hi < 0.7071067811865476) {
    m = m * 2.0;
    e -= 1;
  }
  const dd t = (m - 1.0) / (m + 1.0);
  const dd t2 = t * t;
  dd term = t;
  dd sum = t;
  for (int k = 3; k < 200; k += 2) {
    term = term * t2;
    const dd inc = term / static_cast<double>(k);
    sum = sum + inc;
    if (std::abs(to_double(inc)) < 1e-36 * std::abs(to_double(sum))) break;
  }
  return sum * 2.0 + kLn2 * static_cast<double>(e);
}

// Ascending series J_n(x) = sum_m (-1)^m (x/2)^{2m+n} / (m! (m+n)!).
// Terms grow to ~e^x before decaying, so absolute accuracy is about
// 1e-32 * e^x; keep x <= 30 for full-precision references.
inline dd dd_bessel_j(int n, double x) {
  const dd q = make(x) * 0.5;
  const dd mq2 = -(q * q);
  dd term = make(1.0);
  for (int m = 1; m <= n; ++m) term = term / static_cast<double>(m) * q;
  dd sum = term;
  double peak = std::abs(to_double(term));
  for (int m = 1; m < 500; ++m) {
    term = term * mq2 / static_cast<double>(m) / static_cast<double>(m + n);
    sum = sum + term;
    peak = std::max(peak, std::abs(to_double(term)));
    if (2 * m > x && std::abs(to_double(term)) < 1e-36 * peak) break;
  }
  return sum;
}

// Y_0(x) = (2/pi) [ (ln(x/2) + gamma) J_0(x)
//                   + sum_{m>=1} (-1)^{m+1} H_m (x^2/4)^m / (m!)^2 ]
inline dd dd_bessel_y0(double x) {
  const dd q2 = make(x) * make(x) * 0.25;
  dd term = make(1.0);
  dd h = make(0.0);
  dd sum = make(0.0);
  double sign = 1.0;
  double peak = 0.0;
  for (int m = 1; m < 500; ++m) {
    term = term * q2 / static_cast<double>(m) / static_cast<double>(m);
    h = h + make(1.0) / static_cast<double>(m);
    const dd inc = term * h * sign;
    sum = sum + inc;
    sign = -sign;
    peak = std::max(peak, std::abs(to_double(inc)));
    if (2 * m > x && std::abs(to_double(inc)) < 1e-36 * peak) break;
  }
  const dd lead = (dd_log(make(x) * 0.5) + kGamma) * dd_bessel_j(0, x);
  return (lead + sum) * 2.0 / kPi;
}

// Y_1(x) = (2/pi)(ln(x/2) + gamma) J_1(x) - 2/(pi x)
//          - (x/(2 pi)) sum_{m>=0} (-1)^m (H_m + H_{m+1}) (x^2/4)^m / (m!(m+1)!)
inline dd dd_bessel_y1(double x) {
  const dd q2 = make(x) * make(x) * 0.25;
  dd term = make(1.0);
  dd hm = make(0.0);
  dd hm1 = make(1.0);
  dd sum = make(0.0);
  double sign = 1.0;
  double peak = 0.0;
  for (int m = 0; m < 500; ++m) {
    if (m > 0) {
      term = term * q2 / static_cast<double>(m) / static_cast<double>(m + 1);
      hm = hm + make(1.0) / static_cast<double>(m);
      hm1 = hm1 + make(1.0) / static_cast<double>(m + 1);
    }
    const dd inc = term * (hm + hm1) * sign;
    sum = sum + inc;
    sign = -sign;
    peak = std::max(peak, std::abs(to_double(inc)));
    if (2 * m > x && std::abs(to_double(inc)) < 1e-36 * peak) break;
  }
  const dd lead = (dd_log(make(x) * 0.5) + kGamma) * dd_bessel_j(1, x);
  return lead * 2.0 / kPi - make(2.0) / (kPi * make(x)) - make(x) / (kPi * 2.0) * sum;
}

// Y_{n+1} = (2n/x) Y_n - Y_{n-1}; Y dominates, so upward is stable.
inline dd dd_bessel_y(int n, double x) {
  dd ym = dd_bessel_y0(x);
  if (n == 0) return ym;
  dd y = dd_bessel_y1(x);
  for (int m = 1; m < n; ++m) {
    const dd next = y * (2.0 * m) / x - ym;
    ym = y;
    y = next;
  }
  return y;
}

}  // namespace ddo
