#pragma once

#include <complex>
#include <vector>

// Cylinder functions of integer order on the nonnegative real axis.
//
// J_n comes from Miller's downward recurrence normalised with
// J_0 + 2*sum_m J_{2m} = 1, so no external Bessel routine is involved.
// Y_0/Y_1 use the ascending series for x <= 8 and Steed's continued
// fraction plus the Wronskian closure for x > 8; higher orders follow by
// upward recurrence, which is stable because Y is the dominant solution.

namespace taperscat::specfun {

// J_n(x), n >= 0, x >= 0.
double bessel_j(int n, double x);

// Y_n(x), n >= 0, x > 0.
double bessel_y(int n, double x);

// H^(1)_n(x) = J_n(x) + i Y_n(x), n >= 0, x > 0.
std::complex<double> hankel1(int n, double x);

// J_0..J_nmax in one downward pass.
std::vector<double> bessel_j_sequence(int nmax, double x);

// Y_0..Y_nmax by upward recurrence.
std::vector<double> bessel_y_sequence(int nmax, double x);

// J_0, J_1, Y_0, Y_1 together; the kernel-assembly hot path (x > 0).
struct Cyl01 {
  double j0;
  double j1;
  double y0;
  double y1;
};
Cyl01 cyl01(double x);

namespace detail {
// Both Y_0/Y_1 branches, exposed so tests can cross-validate them on the
// overlap band around the x = 8 switch point. j0/j1 must be J_0(x)/J_1(x).
void y01_series(double x, double j0, double j1, double& y0, double& y1);
void y01_steed(double x, double j0, double j1, double& y0, double& y1);
}  // namespace detail

}  // namespace taperscat::specfun
