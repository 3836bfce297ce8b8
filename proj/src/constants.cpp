#include "yamabe/constants.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "yamabe/errors.hpp"
#include "yamabe/quadrature.hpp"
#include "yamabe/serialize.hpp"

namespace yamabe {

namespace {

/// int_0^pi e^{r(cos t - 1)} sin^{n-2} t dt
double angular_factor(int n, double r) {
  auto f = [n, r](double t) { return std::exp(r * (std::cos(t) - 1.0)) * std::pow(std::sin(t), n - 2); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, std::numbers::pi, 15, 1e-10);
}

/// Radial integral of U^{p-1} r^{n-1} w(r), skipping cells and tail once the
/// bound U^{p-1} e^{shift r} drops below 1e-16 of its peak.
double truncated_radial(const GroundState& gs, double shift, const ScalarFn& weight) {
  const auto x = gs.U.grid().nodes();
  const double p = gs.p;
  auto bound = [&](double r) {
    const double u = gs.U.eval(r).f;
    return u > 0.0 ? std::exp((p - 1.0) * std::log(u) + shift * r) : 0.0;
  };
  double peak = 0.0;
  for (double r : x) peak = std::max(peak, bound(r));
  auto integrand = [&](double r) {
    const double u = gs.U.eval(r).f;
    if (!(u > 0.0)) return 0.0;
    return std::exp((p - 1.0) * std::log(u) + shift * r + (gs.n - 1) * std::log(r)) * weight(r);
  };
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 1 < x.size(); ++i) {
    if (bound(x[i]) < 1e-16 * peak) break;
    total += integrate_cells(x.subspan(i, 2), integrand);
  }
  if (i + 1 == x.size() && bound(x.back()) >= 1e-16 * peak) {
    total += integrate_to_infinity(x.back(), integrand);
  }
  return total;
}

}  // namespace

double c_bold(int N) { return (N - 2.0) / (4.0 * (N - 1.0)); }

DimensionalConstants compute_constants(const GroundState& gs, const CorrectionProfiles& cp, int m) {
  const int n = gs.n;
  const double pn = product_exponent(n, m);
  if (m <= 2 || std::abs(gs.p - pn) > 1e-12) {
    std::ostringstream os;
    os << "ground state built with p=" << gs.p << " but (n,m)=(" << n << "," << m << ") needs p=" << pn;
    throw Error(ErrorCode::ExponentMismatch, os.str());
  }
  const double p = gs.p;
  const auto& grid = gs.U.grid();
  auto U = [&](double r) { return gs.U.eval(r); };
  auto du_over_r = [&](double r) { return r > 0.0 ? U(r).df / r : gs.U.second()[0]; };

  DimensionalConstants dc;
  dc.n = n;
  dc.m = m;
  dc.N = n + m;
  dc.p = p;
  dc.c_bold = c_bold(dc.N);
  const double c = dc.c_bold;

  const auto integrals = energy_integrals(gs.U, n, p);
  RawIntegrals& raw = dc.raw;
  raw.I1 = integrals.I1;
  raw.I2 = integrals.I2;
  raw.Ip = integrals.Ip;
  raw.M2 = moment_reduce(
      grid, [&](double r) { return std::pow(U(r).f, 2); }, Monomial::z1_squared(), n);
  raw.M4 = moment_reduce(
      grid, [&](double r) { return std::pow(du_over_r(r), 2); }, Monomial::z1_fourth(), n);
  raw.G2 = moment_reduce(
      grid,
      [&](double r) {
        const double du = U(r).df;
        return du * du * r * r;
      },
      Monomial::one(), n);
  raw.PsiU4 = moment_reduce(
      grid, [&](double r) { return cp.psi(r) * du_over_r(r); }, Monomial::z1_fourth(), n, false);
  raw.UPsi2 = moment_reduce(
      grid, [&](double r) { return U(r).f * cp.psi(r); }, Monomial::z1_squared(), n, false);
  raw.Q2 = moment_reduce(
      grid,
      [&](double r) {
        const Jet u = U(r);
        return 0.5 * u.df * u.df - u.f * du_over_r(r) / (2.0 - p);
      },
      Monomial::z1_squared(), n);
  raw.UV2 = moment_reduce(
      grid, [&](double r) { return U(r).f * cp.v2base(r); }, Monomial::one(), n);

  dc.alpha = integrals.alpha;
  dc.beta = c * raw.I2 - raw.G2 / (n * (n + 2.0));
  dc.c1 = raw.M4 / 6.0;
  dc.c2 = raw.M2;
  dc.c3 = raw.PsiU4 / 54.0;
  dc.c4 = -c / 6.0 * raw.UPsi2;
  dc.c5 = c / 6.0 * raw.Q2;
  dc.c6 = 8.0 * dc.c1 - 120.0 * (n + 2.0) * dc.c3;
  dc.c7 = -dc.c3 - dc.c4 - dc.c5 - dc.c2 * c / 12.0 + dc.c1 / (24.0 * (n + 2.0));
  dc.c8 = 18.0 * dc.c1 + 30.0 * c * dc.c2 * (n + 2.0);
  dc.c9 = 0.5 * c * raw.UV2;
  dc.beta_check = c * raw.I2 - 2.0 * dc.c1;
  return dc;
}

DimensionalConstants compute_constants(int n, int m, const GroundStateOptions& options) {
  const GroundState gs = solve_ground_state(n, product_exponent(n, m), options);
  return compute_constants(gs, build_corrections(gs), m);
}

GammaValue gamma(const GroundState& gs, const std::vector<double>& b) {
  double norm2 = 0.0;
  for (double v : b) norm2 += v * v;
  if (static_cast<int>(b.size()) != gs.n || std::abs(std::sqrt(norm2) - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "b must be a unit vector in R^" << gs.n << " (|b| = " << std::sqrt(norm2) << ", dim " << b.size()
       << ")";
    throw Error(ErrorCode::NotUnit, os.str());
  }
  // Rotating b onto e_1 leaves U fixed, so only the polar angle to b matters.
  const int n = gs.n;
  const double value =
      sphere_area(n - 2) * truncated_radial(gs, 1.0, [n](double r) { return angular_factor(n, r); });
  return {b, value};
}

double gamma_zero(const GroundState& gs) {
  return sphere_area(gs.n - 1) * truncated_radial(gs, 0.0, [](double) { return 1.0; });
}

std::vector<std::pair<int, int>> table_pairs(int max_N) {
  std::vector<std::pair<int, int>> out;
  for (int N = 6; N <= max_N; ++N) {
    for (int n = 3; n <= N - 3; ++n) out.emplace_back(n, N - n);
  }
  return out;
}

std::vector<DimensionalConstants> beta_table(const std::vector<std::pair<int, int>>& pairs,
                                             const GroundStateOptions& options) {
  for (const auto& [n, m] : pairs) {
    if (n <= 2 || m <= 2) {
      throw Error(ErrorCode::InvalidArgument, "table pairs need n, m > 2");
    }
  }
  std::vector<std::future<DimensionalConstants>> jobs;
  jobs.reserve(pairs.size());
  for (const auto& [n, m] : pairs) {
    jobs.push_back(std::async(std::launch::async, [n, m, &options] { return compute_constants(n, m, options); }));
  }
  std::vector<DimensionalConstants> rows;
  rows.reserve(pairs.size());
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

std::string beta_table_csv(const std::vector<DimensionalConstants>& rows) {
  std::ostringstream os;
  os << "n,m,N,p,alpha,beta,c1,c2,c3,c4,c5,c6,c7,c8,c9\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.m << ',' << r.N;
    for (double v : {r.p, r.alpha, r.beta, r.c1, r.c2, r.c3, r.c4, r.c5, r.c6, r.c7, r.c8, r.c9}) {
      os << ',' << format_number(v);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace yamabe
