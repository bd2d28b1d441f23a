#include "taperscat/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace taperscat::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

// Start order for the downward pass. The trial solution must be seeded far
// enough beyond max(n, x) that the contaminating Y-component has decayed
// below machine precision by the time order n is reached.
int miller_start(int n, double x) {
  int m = std::max(n + 20, static_cast<int>(1.4 * x) + 40);
  return m + (m & 1);
}

void check_order(int n) {
  if (n < 0) throw std::invalid_argument("bessel order must be >= 0, got " + std::to_string(n));
}

void check_arg_j(double x) {
  if (!(x >= 0.0)) throw std::domain_error("bessel_j requires x >= 0");
}

void check_arg_y(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_y requires x > 0");
}

// Downward Miller pass; fills out[0..nmax] when out != nullptr, always
// returns {J_0, J_1}. Values are rescaled on the fly to dodge overflow,
// then normalised by J_0 + 2*(J_2 + J_4 + ...) = 1.
struct J01 {
  double j0;
  double j1;
};

J01 miller(int nmax, double x, std::vector<double>* out) {
  const int m0 = miller_start(nmax, x);
  double fp = 0.0;       // trial value at order m+1
  double f = 1e-30;      // trial value at order m
  double f1 = 0.0;       // trial J_1 once reached
  double sum = 0.0;      // accumulates 2*(even orders >= 2)
  int filled_from = nmax + 1;
  for (int m = m0; m >= 1; --m) {
    const double fm = (2.0 * m / x) * f - fp;  // trial at order m-1
    fp = f;
    f = fm;
    const int ord = m - 1;
    if (ord == 1) f1 = f;
    if (out && ord <= nmax) {
      (*out)[ord] = f;
      filled_from = ord;
    }
    if (ord > 0 && (ord & 1) == 0) sum += 2.0 * f;
    if (std::abs(f) > 1e250) {
      f *= 1e-250;
      fp *= 1e-250;
      f1 *= 1e-250;
      sum *= 1e-250;
      if (out) {
        for (int q = filled_from; q <= nmax; ++q) (*out)[q] *= 1e-250;
      }
    }
  }
  const double norm = f + sum;  // f is the trial J_0
  if (out) {
    for (int q = 0; q <= nmax; ++q) (*out)[q] /= norm;
  }
  return {f / norm, f1 / norm};
}

// Two-term ascending series; only used where the recurrence step 2m/x would
// need excessive rescaling bookkeeping.
void j_tiny(int nmax, double x, std::vector<double>* out, double* j0, double* j1) {
  double term = 1.0;  // (x/2)^n / n!
  for (int n = 0; n <= nmax; ++n) {
    const double v = term * (1.0 - x * x / (4.0 * (n + 1.0)));
    if (out) (*out)[n] = v;
    if (n == 0 && j0) *j0 = v;
    if (n == 1 && j1) *j1 = v;
    term *= x / (2.0 * (n + 1.0));
    if (term == 0.0) break;
  }
}

J01 j01(double x) {
  if (x == 0.0) return {1.0, 0.0};
  if (x < 1e-10) {
    double a = 0.0, b = 0.0;
    j_tiny(1, x, nullptr, &a, &b);
    return {a, b};
  }
  return miller(1, x, nullptr);
}

}  // namespace

namespace detail {

void y01_series(double x, double j0, double j1, double& y0, double& y1) {
  const double lg = std::log(0.5 * x) + kEulerGamma;
  const double q = 0.25 * x * x;

  // Y_0 = (2/pi)[lg*J_0 + sum_{m>=1} (-1)^{m+1} h_m q^m / (m!)^2]
  double acc0 = 0.0;
  double t = 1.0;  // q^m/(m!)^2
  double h = 0.0;  // harmonic number h_m
  double sgn = -1.0;
  for (int m = 1; m <= 60; ++m) {
    t *= q / (static_cast<double>(m) * m);
    h += 1.0 / m;
    sgn = -sgn;
    const double term = sgn * h * t;
    acc0 += term;
    if (std::abs(term) < 1e-19 * std::abs(acc0) + 1e-300) break;
  }
  y0 = (2.0 / kPi) * (lg * j0 + acc0);

  // Y_1 = (2/pi) lg J_1 - 2/(pi x) - (1/pi) sum_{m>=0} (-1)^m (h_m + h_{m+1}) s_m,
  // s_m = (x/2)^{2m+1} / (m!(m+1)!)
  double acc1 = 0.0;
  double s = 0.5 * x;
  h = 0.0;
  sgn = 1.0;
  for (int m = 0; m <= 60; ++m) {
    const double hm1 = h + 1.0 / (m + 1.0);
    const double term = sgn * (h + hm1) * s;
    acc1 += term;
    if (std::abs(term) < 1e-19 * std::abs(acc1) + 1e-300) break;
    h = hm1;
    sgn = -sgn;
    s *= q / ((m + 1.0) * (m + 2.0));
  }
  y1 = (2.0 / kPi) * lg * j1 - 2.0 / (kPi * x) - acc1 / kPi;
}

void y01_steed(double x, double j0, double j1, double& y0, double& y1) {
  // Lentz evaluation of CF2:
  //   p + i q = -1/(2x) + i + (i/x) * a_1/(b_1 + a_2/(b_2 + ...)),
  //   a_j = ((2j-1)/2)^2, b_j = 2(x + i j).
  const std::complex<double> I(0.0, 1.0);
  const std::complex<double> tiny(1e-290, 0.0);
  std::complex<double> fcf = tiny;
  std::complex<double> C = fcf;
  std::complex<double> D = 0.0;
  bool converged = false;
  for (int j = 1; j <= 20000; ++j) {
    const double tw = 0.5 * (2.0 * j - 1.0);
    const std::complex<double> a(tw * tw, 0.0);
    const std::complex<double> b(2.0 * x, 2.0 * j);
    D = b + a * D;
    if (D == std::complex<double>(0.0)) D = tiny;
    C = b + a / C;
    if (C == std::complex<double>(0.0)) C = tiny;
    D = 1.0 / D;
    const std::complex<double> delta = C * D;
    fcf *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      converged = true;
      break;
    }
  }
  if (!converged) throw std::runtime_error("steed continued fraction failed to converge");
  const std::complex<double> pq = std::complex<double>(-0.5 / x, 1.0) + I / x * fcf;
  const double p = pq.real();
  const double q = pq.imag();
  y0 = (p * j0 + j1) / q;
  y1 = -(q * j0 + p * y0);
}

}  // namespace detail

std::vector<double> bessel_j_sequence(int nmax, double x) {
  check_order(nmax);
  check_arg_j(x);
  std::vector<double> out(nmax + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (x < 1e-10) {
    j_tiny(nmax, x, &out, nullptr, nullptr);
    return out;
  }
  miller(nmax, x, &out);
  return out;
}

double bessel_j(int n, double x) {
  check_order(n);
  check_arg_j(x);
  const J01 j = j01(x);
  if (n == 0) return j.j0;
  if (n == 1) return j.j1;
  return bessel_j_sequence(n, x)[n];
}

Cyl01 cyl01(double x) {
  check_arg_y(x);
  const J01 j = j01(x);
  Cyl01 r{j.j0, j.j1, 0.0, 0.0};
  if (x <= 8.0) {
    detail::y01_series(x, j.j0, j.j1, r.y0, r.y1);
  } else {
    detail::y01_steed(x, j.j0, j.j1, r.y0, r.y1);
  }
  return r;
}

std::vector<double> bessel_y_sequence(int nmax, double x) {
  check_order(nmax);
  check_arg_y(x);
  const Cyl01 c = cyl01(x);
  std::vector<double> out(nmax + 1);
  out[0] = c.y0;
  if (nmax >= 1) out[1] = c.y1;
  for (int n = 1; n < nmax; ++n) {
    out[n + 1] = (2.0 * n / x) * out[n] - out[n - 1];
  }
  return out;
}

double bessel_y(int n, double x) {
  check_order(n);
  check_arg_y(x);
  const Cyl01 c = cyl01(x);
  if (n == 0) return c.y0;
  if (n == 1) return c.y1;
  double ym = c.y0, y = c.y1;
  for (int m = 1; m < n; ++m) {
    const double yn = (2.0 * m / x) * y - ym;
    ym = y;
    y = yn;
  }
  return y;
}

std::complex<double> hankel1(int n, double x) {
  check_order(n);
  check_arg_y(x);
  if (n <= 1) {
    const Cyl01 c = cyl01(x);
    return n == 0 ? std::complex<double>(c.j0, c.y0) : std::complex<double>(c.j1, c.y1);
  }
  return {bessel_j(n, x), bessel_y(n, x)};
}

}  // namespace taperscat::specfun
