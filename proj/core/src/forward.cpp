#include "taperscat/forward.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "taperscat/specfun.hpp"

namespace taperscat::forward {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

using Mat = Eigen::MatrixXcd;
using Cvec = Eigen::VectorXcd;

// Weights R_m for integrands carrying a log(4 sin^2((t - tau)/2)) factor on
// n equispaced nodes; m is the index offset. Exact for trigonometric
// polynomials of degree < n/2 against the log kernel.
std::vector<double> log_weights(int n) {
  const int half = n / 2;
  std::vector<double> R(n);
  for (int m = 0; m < n; ++m) {
    const double s = 2.0 * kPi * m / n;
    double acc = 0.0;
    for (int q = 1; q < half; ++q) acc += std::cos(q * s) / q;
    R[m] = -(4.0 * kPi / n) * acc - (4.0 * kPi / (n * static_cast<double>(n))) * std::cos(half * s);
  }
  return R;
}

// ln(4 sin^2(pi m / n)) for m = 1..n-1 (the diagonal never uses it).
std::vector<double> log_diffs(int n) {
  std::vector<double> L(n, 0.0);
  for (int m = 1; m < n; ++m) {
    const double s = std::sin(kPi * m / n);
    L[m] = std::log(4.0 * s * s);
  }
  return L;
}

// Signed curvature times speed over speed^2: kappa*|x'| = cross(x', x'')/|x'|^2.
double kappa_speed(const geom::CurveNodes& nd, int i) {
  const double cross = nd.dx[i].x * nd.ddx[i].y - nd.dx[i].y * nd.ddx[i].x;
  return cross / (nd.speed[i] * nd.speed[i]);
}

struct Cyl {
  Complex h0;
  Complex h1;
  double j0;
  double j1;
};

Cyl cyl(double z) {
  const auto c = specfun::cyl01(z);
  return {{c.j0, c.y0}, {c.j1, c.y1}, c.j0, c.j1};
}

// Trigonometric differentiation matrix for even n applied to v.
std::vector<Complex> trig_diff(const std::vector<Complex>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<Complex> out(n, Complex(0.0, 0.0));
  for (int i = 0; i < n; ++i) {
    Complex acc(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sgn = ((i - j) & 1) ? -1.0 : 1.0;
      acc += 0.5 * sgn / std::tan(kPi * (i - j) / n) * v[j];
    }
    out[i] = acc;
  }
  return out;
}

struct Geometry {
  std::vector<geom::BoundaryCurve> curves;
  std::vector<geom::CurveNodes> nodes;
  int n = 0;
  double k = 0.0;
  double eta = 0.0;
  double w = 0.0;  // trapezoid weight 2*pi/n
  std::vector<double> R;
  std::vector<double> L;

  int P() const { return static_cast<int>(curves.size()); }
  int size() const { return P() * n; }
  int g(int p, int i) const { return p * n + i; }
};

Geometry make_geometry(std::vector<geom::BoundaryCurve> curves, double k, int n,
                       double eta_override) {
  if (curves.empty()) throw std::invalid_argument("forward: at least one boundary curve required");
  if (!(k > 0.0)) throw std::invalid_argument("forward: k must be > 0");
  if (n < 32 || n % 2 != 0) throw std::invalid_argument("forward: n must be even and >= 32");
  Geometry geo;
  geo.curves = std::move(curves);
  geo.n = n;
  geo.k = k;
  geo.eta = eta_override < 0.0 ? k : eta_override;
  geo.w = 2.0 * kPi / n;
  for (const auto& c : geo.curves) geo.nodes.push_back(geom::sample_nodes(c, n));
  geo.R = log_weights(n);
  geo.L = log_diffs(n);
  return geo;
}

// Combined kernel K - i eta S between same-curve nodes i (field) and j
// (integration), split into log coefficient and remainder.
void combined_split(const Geometry& geo, const geom::CurveNodes& nd, int i, int j, const Cyl& c,
                    double r, Complex& c1, Complex& c2, double Lij) {
  const double spj = nd.speed[j];
  const Vec2 diff = nd.x[i] - nd.x[j];
  const double dw = diff.x * nd.dx[j].y - diff.y * nd.dx[j].x;  // (x_i - x_j) . (x2', -x1')_j
  const double s1 = -(1.0 / (4.0 * kPi)) * c.j0 * spj;
  const Complex sfull = Complex(0.0, 0.25) * c.h0 * spj;
  const double k1 = -(geo.k / (4.0 * kPi)) * c.j1 * dw / r;
  const Complex kfull = Complex(0.0, 0.25 * geo.k) * c.h1 * dw / r;
  const Complex ieta(0.0, geo.eta);
  c1 = k1 - ieta * s1;
  c2 = (kfull - ieta * sfull) - c1 * Lij;
}

Complex combined_diag(const Geometry& geo, const geom::CurveNodes& nd, int i) {
  const double sp = nd.speed[i];
  const double s1 = -sp / (4.0 * kPi);
  const Complex s2 = Complex(0.0, 0.25 * sp) -
                     (std::log(0.5 * geo.k * sp) + kEulerGamma) / (2.0 * kPi) * sp;
  const double k2 = -kappa_speed(nd, i) * sp / (4.0 * kPi);
  const Complex ieta(0.0, geo.eta);
  const Complex c1 = -ieta * s1;            // k1 vanishes on the diagonal
  const Complex c2 = Complex(k2, 0.0) - ieta * s2;
  return geo.R[0] * c1 + geo.w * c2;
}

// Plain combined kernel between nodes on different curves (smooth there).
Complex combined_cross(const Geometry& geo, const geom::CurveNodes& nf, int i,
                       const geom::CurveNodes& ns, int j) {
  const Vec2 diff = nf.x[i] - ns.x[j];
  const double r = norm(diff);
  const Cyl c = cyl(geo.k * r);
  const double dw = diff.x * ns.dx[j].y - diff.y * ns.dx[j].x;
  const Complex kfull = Complex(0.0, 0.25 * geo.k) * c.h1 * dw / r;
  const Complex sfull = Complex(0.0, 0.25) * c.h0 * ns.speed[j];
  return kfull - Complex(0.0, geo.eta) * sfull;
}

Mat assemble(const Geometry& geo) {
  const int NP = geo.size();
  Mat A = Mat::Zero(NP, NP);
  for (int p = 0; p < geo.P(); ++p) {
    const auto& nd = geo.nodes[p];
    for (int i = 0; i < geo.n; ++i) {
      A(geo.g(p, i), geo.g(p, i)) = 0.5 + combined_diag(geo, nd, i);
      for (int j = i + 1; j < geo.n; ++j) {
        const double r = norm(nd.x[i] - nd.x[j]);
        const Cyl c = cyl(geo.k * r);
        const int m = j - i;
        Complex c1, c2;
        combined_split(geo, nd, i, j, c, r, c1, c2, geo.L[m]);
        A(geo.g(p, i), geo.g(p, j)) = geo.R[m] * c1 + geo.w * c2;
        combined_split(geo, nd, j, i, c, r, c1, c2, geo.L[m]);
        A(geo.g(p, j), geo.g(p, i)) = geo.R[m] * c1 + geo.w * c2;
      }
    }
    for (int q = 0; q < geo.P(); ++q) {
      if (q == p) continue;
      for (int i = 0; i < geo.n; ++i) {
        for (int j = 0; j < geo.n; ++j) {
          A(geo.g(p, i), geo.g(q, j)) = geo.w * combined_cross(geo, geo.nodes[p], i, geo.nodes[q], j);
        }
      }
    }
  }
  return A;
}

void check_exterior(const DensitySolution& sol, Vec2 x) {
  for (const auto& c : sol.curves) {
    if (geom::contains(c, x)) {
      throw std::domain_error("field evaluation point lies inside an obstacle");
    }
    if (geom::distance_to_curve(c, x) < 1e-10) {
      throw std::domain_error("field evaluation point lies on an obstacle boundary");
    }
  }
}

}  // namespace

struct NystromSolver::Impl {
  Geometry geo;
  Eigen::PartialPivLU<Mat> lu;
};

NystromSolver::NystromSolver(std::vector<geom::BoundaryCurve> curves, double k, int n_per_curve,
                             double eta_override)
    : impl_(std::make_unique<Impl>()) {
  impl_->geo = make_geometry(std::move(curves), k, n_per_curve, eta_override);
  impl_->lu.compute(assemble(impl_->geo));
  if (impl_->lu.rcond() < 1e-12) {
    throw std::runtime_error("forward: boundary system is numerically singular (rcond < 1e-12)");
  }
}

NystromSolver::~NystromSolver() = default;
NystromSolver::NystromSolver(NystromSolver&&) noexcept = default;
NystromSolver& NystromSolver::operator=(NystromSolver&&) noexcept = default;

double NystromSolver::wavenumber() const { return impl_->geo.k; }
double NystromSolver::eta() const { return impl_->geo.eta; }
int NystromSolver::unknowns() const { return impl_->geo.size(); }

DensitySolution NystromSolver::solve(const IncidentFn& ui) const {
  const Geometry& geo = impl_->geo;
  const int NP = geo.size();
  Cvec b(NP);
  DensitySolution sol;
  sol.curves = geo.curves;
  sol.k = geo.k;
  sol.eta = geo.eta;
  sol.n_per_curve = geo.n;
  sol.nodes = geo.nodes;
  sol.boundary_incident.resize(NP);
  for (int p = 0; p < geo.P(); ++p) {
    for (int i = 0; i < geo.n; ++i) {
      const Complex v = ui(geo.nodes[p].x[i]);
      sol.boundary_incident[geo.g(p, i)] = v;
      b(geo.g(p, i)) = -v;
    }
  }
  const Cvec phi = impl_->lu.solve(b);
  sol.density.assign(phi.data(), phi.data() + NP);
  return sol;
}

DensitySolution solve_density(const std::vector<geom::BoundaryCurve>& curves,
                              const IncidentFn& ui, double k, int n_per_curve) {
  return NystromSolver(curves, k, n_per_curve).solve(ui);
}

Complex eval_scattered(const DensitySolution& sol, Vec2 x) {
  check_exterior(sol, x);
  const double w = 2.0 * kPi / sol.n_per_curve;
  const Complex ieta(0.0, sol.eta);
  Complex acc(0.0, 0.0);
  for (std::size_t p = 0; p < sol.curves.size(); ++p) {
    const auto& nd = sol.nodes[p];
    for (int j = 0; j < sol.n_per_curve; ++j) {
      const Vec2 diff = x - nd.x[j];
      const double r = norm(diff);
      const Cyl c = cyl(sol.k * r);
      const double dw = diff.x * nd.dx[j].y - diff.y * nd.dx[j].x;
      const Complex kern = Complex(0.0, 0.25 * sol.k) * c.h1 * dw / r -
                           ieta * Complex(0.0, 0.25) * c.h0 * nd.speed[j];
      acc += w * kern * sol.density[p * sol.n_per_curve + j];
    }
  }
  return acc;
}

BoundaryTraces boundary_traces(const DensitySolution& sol) {
  const int P = static_cast<int>(sol.curves.size());
  const int n = sol.n_per_curve;
  const int NP = P * n;
  const double k = sol.k;
  const double w = 2.0 * kPi / n;
  const auto R = log_weights(n);
  const auto L = log_diffs(n);
  const Complex ieta(0.0, sol.eta);
  const Complex I(0.0, 1.0);

  BoundaryTraces tr;
  tr.us.assign(NP, Complex(0.0, 0.0));
  tr.dnus.assign(NP, Complex(0.0, 0.0));

  for (int p = 0; p < P; ++p) {
    const auto& nd = sol.nodes[p];
    const std::vector<Complex> phi(sol.density.begin() + p * n, sol.density.begin() + (p + 1) * n);

    // K phi, S phi, K' phi, S_nunu phi on the same curve (log quadrature),
    // and Stilde (Dphi) for the tangential Maue term.
    const std::vector<Complex> dphi = trig_diff(phi);
    std::vector<Complex> Kphi(n), Sphi(n), Kpphi(n), Snn(n), Std(n);
    for (int i = 0; i < n; ++i) {
      Complex aK(0, 0), aS(0, 0), aKp(0, 0), aSnn(0, 0), aStd(0, 0);
      for (int j = 0; j < n; ++j) {
        if (j == i) {
          const double sp = nd.speed[i];
          const double ks = kappa_speed(nd, i);
          const Complex s2 = Complex(0.0, 0.25) * sp -
                             (std::log(0.5 * k * sp) + kEulerGamma) / (2.0 * kPi) * sp;
          const Complex st2 = Complex(0.0, 0.25) -
                              (std::log(0.5 * k * sp) + kEulerGamma) / (2.0 * kPi);
          const double s1 = -sp / (4.0 * kPi);
          const double st1 = -1.0 / (4.0 * kPi);
          const double k2 = -ks * sp / (4.0 * kPi);
          aS += (R[0] * s1 + w * s2) * phi[j];
          aK += (w * k2) * phi[j];
          aKp += (w * k2) * phi[j];
          aSnn += (R[0] * s1 + w * s2) * phi[j];
          aStd += (R[0] * st1 + w * st2) * dphi[j];
          continue;
        }
        const int m = (i - j + n) % n;
        const Vec2 diff = nd.x[i] - nd.x[j];
        const double r = norm(diff);
        const Cyl c = cyl(k * r);
        const double spj = nd.speed[j];
        const double lij = L[m];

        const double s1 = -(1.0 / (4.0 * kPi)) * c.j0 * spj;
        const Complex sfull = Complex(0.0, 0.25) * c.h0 * spj;
        aS += (R[m] * s1 + w * (sfull - s1 * lij)) * phi[j];

        const double dw_ = diff.x * nd.dx[j].y - diff.y * nd.dx[j].x;
        const double k1 = -(k / (4.0 * kPi)) * c.j1 * dw_ / r;
        const Complex kfull = Complex(0.0, 0.25 * k) * c.h1 * dw_ / r;
        aK += (R[m] * k1 + w * (kfull - k1 * lij)) * phi[j];

        const double dp = (diff.x * nd.dx[i].y - diff.y * nd.dx[i].x) * spj / nd.speed[i];
        const double kp1 = (k / (4.0 * kPi)) * c.j1 * dp / r;
        const Complex kpfull = -Complex(0.0, 0.25 * k) * c.h1 * dp / r;
        aKp += (R[m] * kp1 + w * (kpfull - kp1 * lij)) * phi[j];

        const double cnu = dot(nd.nu[i], nd.nu[j]);
        const double snn1 = s1 * cnu;
        const Complex snnfull = sfull * cnu;
        aSnn += (R[m] * snn1 + w * (snnfull - snn1 * lij)) * phi[j];

        const double st1 = -(1.0 / (4.0 * kPi)) * c.j0;
        const Complex stfull = Complex(0.0, 0.25) * c.h0;
        aStd += (R[m] * st1 + w * (stfull - st1 * lij)) * dphi[j];
      }
      Kphi[i] = aK;
      Sphi[i] = aS;
      Kpphi[i] = aKp;
      Snn[i] = aSnn;
      Std[i] = aStd;
    }
    const std::vector<Complex> dStd = trig_diff(Std);
    for (int i = 0; i < n; ++i) {
      const int gi = p * n + i;
      tr.us[gi] = 0.5 * phi[i] + Kphi[i] - ieta * Sphi[i];
      const Complex Tphi = dStd[i] / nd.speed[i] + k * k * Snn[i];
      tr.dnus[gi] = Tphi - ieta * (Kpphi[i] - 0.5 * phi[i]);
    }

    // contributions from the other curves: all kernels are smooth there
    for (int q = 0; q < P; ++q) {
      if (q == p) continue;
      const auto& ns = sol.nodes[q];
      for (int i = 0; i < n; ++i) {
        const int gi = p * n + i;
        Complex us_add(0, 0), dn_add(0, 0);
        for (int j = 0; j < n; ++j) {
          const Complex pj = sol.density[q * n + j];
          const Vec2 diff = sol.nodes[p].x[i] - ns.x[j];
          const double r = norm(diff);
          const Cyl c = cyl(k * r);
          const double spj = ns.speed[j];
          const double dw_ = diff.x * ns.dx[j].y - diff.y * ns.dx[j].x;
          const Complex kfull = Complex(0.0, 0.25 * k) * c.h1 * dw_ / r;
          const Complex sfull = Complex(0.0, 0.25) * c.h0 * spj;
          us_add += w * (kfull - ieta * sfull) * pj;

          const Vec2 nui = sol.nodes[p].nu[i];
          const Vec2 nuj = ns.nu[j];
          const double a = dot(diff, nui) / r;
          const double bb = dot(diff, nuj) / r;
          const double cc = dot(nui, nuj);
          const Complex tfull =
              Complex(0.0, 0.25 * k) *
              (k * c.h0 * a * bb - 2.0 * c.h1 / r * a * bb + c.h1 / r * cc) * spj;
          const Complex kpfull = -Complex(0.0, 0.25 * k) * c.h1 * (dot(diff, nui) / r) * spj;
          dn_add += w * (tfull - ieta * kpfull) * pj;
        }
        tr.us[gi] += us_add;
        tr.dnus[gi] += dn_add;
      }
    }
  }
  return tr;
}

Complex greens_rep_eval(const DensitySolution& sol, const BoundaryTraces& traces, Vec2 x,
                        double illum_threshold) {
  check_exterior(sol, x);
  const int n = sol.n_per_curve;
  const double w = 2.0 * kPi / n;
  double uimax = 0.0;
  for (const auto& v : sol.boundary_incident) uimax = std::max(uimax, std::abs(v));
  const double cut = illum_threshold > 0.0 ? illum_threshold * uimax : -1.0;
  Complex acc(0.0, 0.0);
  for (std::size_t p = 0; p < sol.curves.size(); ++p) {
    const auto& nd = sol.nodes[p];
    for (int j = 0; j < n; ++j) {
      const int gj = static_cast<int>(p) * n + j;
      if (cut > 0.0 && std::abs(sol.boundary_incident[gj]) < cut) continue;
      const Vec2 diff = x - nd.x[j];
      const double r = norm(diff);
      const Cyl c = cyl(sol.k * r);
      const Complex dphi_nu =
          Complex(0.0, 0.25 * sol.k) * c.h1 * (diff.x * nd.nu[j].x + diff.y * nd.nu[j].y) / r;
      const Complex phi = Complex(0.0, 0.25) * c.h0;
      acc += w * (traces.us[gj] * dphi_nu - traces.dnus[gj] * phi) * nd.speed[j];
    }
  }
  return acc;
}

Complex greens_rep_eval(const DensitySolution& sol, Vec2 x, double illum_threshold) {
  return greens_rep_eval(sol, boundary_traces(sol), x, illum_threshold);
}

Complex mie_series_reference(double a, double k, Vec2 d, Vec2 x, int nterms) {
  if (!(a > 0.0) || !(k > 0.0)) throw std::invalid_argument("mie: a and k must be > 0");
  if (std::abs(norm(d) - 1.0) > 1e-12) throw std::invalid_argument("mie: d must be unit length");
  if (nterms < 1) throw std::invalid_argument("mie: nterms must be >= 1");
  const double rx = norm(x);
  if (rx < a * (1.0 - 1e-12)) throw std::domain_error("mie: evaluation point inside the circle");

  const auto Ja = specfun::bessel_j_sequence(nterms, k * a);
  const auto Ya = specfun::bessel_y_sequence(nterms, k * a);
  const auto Jx = specfun::bessel_j_sequence(nterms, k * rx);
  const auto Yx = specfun::bessel_y_sequence(nterms, k * rx);

  const double dth = std::atan2(x.y, x.x) - std::atan2(d.y, d.x);
  Complex sum = Complex(Ja[0], 0.0) / Complex(Ja[0], Ya[0]) * Complex(Jx[0], Yx[0]);
  Complex ipow(1.0, 0.0);
  for (int m = 1; m <= nterms; ++m) {
    ipow *= Complex(0.0, 1.0);
    const Complex ratio = Complex(Ja[m], 0.0) / Complex(Ja[m], Ya[m]);
    sum += 2.0 * ipow * ratio * Complex(Jx[m], Yx[m]) * std::cos(m * dth);
  }
  return -sum;
}

}  // namespace taperscat::forward
