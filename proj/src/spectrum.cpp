#include "wavefreeze/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wavefreeze/evolution.hpp"

namespace wavefreeze::spectrum {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::string fmt(Complex z) { return "(" + fmt(z.real()) + ", " + fmt(z.imag()) + ")"; }

std::size_t idx(int i, int j, int n) { return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + j; }

void check_grid(const phaseplane::StationaryProfile& profile, const GridSpec& grid) {
  const double tol = 1e-9 * (1.0 + std::abs(profile.a) + std::abs(profile.b));
  if (std::abs(grid.a - profile.a) > tol || std::abs(grid.b - profile.b) > tol)
    fail(ErrorKind::Domain, "grid [" + fmt(grid.a) + ", " + fmt(grid.b) + "] does not match the profile interval [" +
                                fmt(profile.a) + ", " + fmt(profile.b) + "]");
  require(grid.cells >= 3, "operator assembly needs at least 3 cells");
}

double node_weight(const GridSpec& grid, int j) { return (j == 0 || j == grid.cells ? 0.5 : 1.0) * grid.dx(); }

void balance(std::vector<double>& a, int n) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a[idx(j, i, n)]);
        r += std::abs(a[idx(i, j, n)]);
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        const double ginv = 1.0 / f;
        for (int j = 0; j < n; ++j) a[idx(i, j, n)] *= ginv;
        for (int j = 0; j < n; ++j) a[idx(j, i, n)] *= f;
      }
    }
  }
}

void hessenberg(std::vector<double>& a, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k + 2 < n; ++k) {
    double norm = 0.0;
    for (int i = k + 1; i < n; ++i) norm = std::hypot(norm, a[idx(i, k, n)]);
    if (norm == 0.0) continue;
    const double x0 = a[idx(k + 1, k, n)];
    const double alpha = x0 >= 0.0 ? -norm : norm;
    double vnorm_sq = 0.0;
    for (int i = k + 1; i < n; ++i) {
      v[static_cast<std::size_t>(i)] = a[idx(i, k, n)];
      if (i == k + 1) v[static_cast<std::size_t>(i)] -= alpha;
      vnorm_sq += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    if (vnorm_sq == 0.0) continue;
    const double beta = 2.0 / vnorm_sq;
    for (int j = k; j < n; ++j) {
      double s = 0.0;
      for (int i = k + 1; i < n; ++i) s += v[static_cast<std::size_t>(i)] * a[idx(i, j, n)];
      s *= beta;
      for (int i = k + 1; i < n; ++i) a[idx(i, j, n)] -= s * v[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = k + 1; j < n; ++j) s += a[idx(i, j, n)] * v[static_cast<std::size_t>(j)];
      s *= beta;
      for (int j = k + 1; j < n; ++j) a[idx(i, j, n)] -= s * v[static_cast<std::size_t>(j)];
    }
    a[idx(k + 1, k, n)] = alpha;
    for (int i = k + 2; i < n; ++i) a[idx(i, k, n)] = 0.0;
  }
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix.
std::vector<Complex> hessenberg_qr(std::vector<double>& a, int n, long max_sweeps) {
  auto A = [&](int i, int j) -> double& { return a[idx(i, j, n)]; };
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> wr(static_cast<std::size_t>(n), 0.0), wi(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> found(static_cast<std::size_t>(n), false);

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(A(i, j));

  long sweeps = 0;
  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(A(l, l - 1)) <= eps * s) {
          A(l, l - 1) = 0.0;
          break;
        }
      }
      double x = A(nn, nn);
      if (l == nn) {
        wr[static_cast<std::size_t>(nn)] = x + t;
        wi[static_cast<std::size_t>(nn)] = 0.0;
        found[static_cast<std::size_t>(nn)] = true;
        --nn;
      } else {
        double y = A(nn - 1, nn - 1);
        double w = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          const auto i1 = static_cast<std::size_t>(nn - 1), i2 = static_cast<std::size_t>(nn);
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[i1] = wr[i2] = x + z;
            if (z != 0.0) wr[i2] = x - w / z;
            wi[i1] = wi[i2] = 0.0;
          } else {
            wr[i1] = wr[i2] = x + p;
            wi[i1] = z;
            wi[i2] = -z;
          }
          found[i1] = found[i2] = true;
          nn -= 2;
        } else {
          if (++sweeps > max_sweeps) {
            std::vector<Complex> partial;
            for (int i = 0; i < n; ++i)
              if (found[static_cast<std::size_t>(i)])
                partial.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
            throw QrNonConvergence("QR iteration did not converge within " + std::to_string(max_sweeps) +
                                       " sweeps (" + std::to_string(partial.size()) + " of " + std::to_string(n) +
                                       " eigenvalues found)",
                                   std::move(partial));
          }
          if (its == 10 || its == 20) {
            t += x;
            for (int i = 0; i <= nn; ++i) A(i, i) -= x;
            const double s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = A(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - r - s;
            r = A(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) + std::abs(A(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            A(i, i - 2) = 0.0;
            if (i != m + 2) A(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = A(k, k - 1);
              q = A(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = A(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) A(k, k - 1) = -A(k, k - 1);
            } else {
              A(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = A(k, j) + q * A(k + 1, j);
              if (k != nn - 1) {
                p += r * A(k + 2, j);
                A(k + 2, j) -= p * z;
              }
              A(k + 1, j) -= p * y;
              A(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * A(i, k) + y * A(i, k + 1);
              if (k != nn - 1) {
                p += z * A(i, k + 2);
                A(i, k + 2) -= p * r;
              }
              A(i, k + 1) -= p * q;
              A(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
  return out;
}

// In-place LU with partial pivoting; returns the pivot order.
std::vector<int> lu_factor(std::vector<double>& a, int n) {
  std::vector<int> piv(static_cast<std::size_t>(n));
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  const double tiny = std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[idx(i, k, n)]) > std::abs(a[idx(p, k, n)])) p = i;
    piv[static_cast<std::size_t>(k)] = p;
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(a[idx(k, j, n)], a[idx(p, j, n)]);
    if (std::abs(a[idx(k, k, n)]) < tiny) a[idx(k, k, n)] = a[idx(k, k, n)] < 0.0 ? -tiny : tiny;
    const double d = a[idx(k, k, n)];
    for (int i = k + 1; i < n; ++i) {
      const double m = a[idx(i, k, n)] / d;
      a[idx(i, k, n)] = m;
      if (m == 0.0) continue;
      for (int j = k + 1; j < n; ++j) a[idx(i, j, n)] -= m * a[idx(k, j, n)];
    }
  }
  return piv;
}

void lu_solve(const std::vector<double>& lu, const std::vector<int>& piv, int n, std::vector<double>& b) {
  for (int k = 0; k < n; ++k) {
    std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(piv[static_cast<std::size_t>(k)])]);
    for (int i = k + 1; i < n; ++i) b[static_cast<std::size_t>(i)] -= lu[idx(i, k, n)] * b[static_cast<std::size_t>(k)];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) s -= lu[idx(i, j, n)] * b[static_cast<std::size_t>(j)];
    b[static_cast<std::size_t>(i)] = s / lu[idx(i, i, n)];
  }
}

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s = std::hypot(s, v);
  return s;
}

}  // namespace

const char* to_string(OperatorKind kind) { return kind == OperatorKind::Local ? "local" : "nonlocal"; }

std::vector<double> OperatorMatrix::apply(const std::vector<double>& x) const {
  require(x.size() == static_cast<std::size_t>(n), "vector length does not match the operator");
  std::vector<double> y(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += (*this)(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

GridSpec grid_for(const phaseplane::StationaryProfile& profile, double dx) {
  require(dx > 0.0, "dx must be positive");
  const int cells = std::max(8, static_cast<int>(std::lround(profile.length() / dx)));
  return GridSpec::from_cells(profile.a, profile.b, cells);
}

Linearization sample_profile(const phaseplane::StationaryProfile& profile, const GridSpec& grid) {
  check_grid(profile, grid);
  return {grid, profile.lambda_r, phaseplane::profile_on_grid(profile, grid),
          phaseplane::profile_slope_on_grid(profile, grid)};
}

Linearization discrete_equilibrium(const phaseplane::StationaryProfile& profile, const GridSpec& grid,
                                   const BistableReaction& reaction) {
  check_grid(profile, grid);
  auto eq = evolution::discrete_stationary(reaction, grid, evolution::SpeedFunctional::Potential,
                                           phaseplane::profile_on_grid(profile, grid));
  auto slopes = evolution::gradient(grid, eq.v);
  return {grid, eq.lambda, std::move(eq.v), std::move(slopes)};
}

OperatorMatrix assemble_local(const Linearization& lin, const BistableReaction& reaction) {
  const GridSpec& grid = lin.grid;
  require(grid.cells >= 3, "operator assembly needs at least 3 cells");
  require(lin.values.size() == static_cast<std::size_t>(grid.nodes()), "node values do not match the grid");
  OperatorMatrix m;
  m.n = grid.cells - 1;
  m.data.assign(static_cast<std::size_t>(m.n) * m.n, 0.0);
  m.kind = OperatorKind::Local;
  m.grid = grid;
  m.lambda_r = lin.lambda;
  const double dx = grid.dx();
  const double diff = 1.0 / (dx * dx);
  const double adv = lin.lambda / (2.0 * dx);
  for (int i = 0; i < m.n; ++i) {
    const double phi = std::clamp(lin.values[static_cast<std::size_t>(i + 1)], 0.0, 1.0);
    m(i, i) = -2.0 * diff + reaction.f_prime(phi);
    if (i > 0) m(i, i - 1) = diff - adv;
    if (i + 1 < m.n) m(i, i + 1) = diff + adv;
  }
  return m;
}

OperatorMatrix assemble_local(const phaseplane::StationaryProfile& profile, const GridSpec& grid,
                              const BistableReaction& reaction) {
  return assemble_local(sample_profile(profile, grid), reaction);
}

OperatorMatrix assemble_nonlocal(const Linearization& lin, const BistableReaction& reaction) {
  OperatorMatrix m = assemble_local(lin, reaction);
  m.kind = OperatorKind::Nonlocal;
  const GridSpec& grid = lin.grid;
  require(lin.slopes.size() == static_cast<std::size_t>(grid.nodes()), "node slopes do not match the grid");
  const int M = grid.cells;
  const double dx = grid.dx();

  std::vector<double> weighted(static_cast<std::size_t>(M + 1));
  double norm_sq = 0.0;
  for (int j = 0; j <= M; ++j) {
    const double s = lin.slopes[static_cast<std::size_t>(j)];
    weighted[static_cast<std::size_t>(j)] = node_weight(grid, j) * s;
    norm_sq += node_weight(grid, j) * s * s;
  }
  if (!(norm_sq > 0.0)) fail(ErrorKind::Degenerate, "profile slope has zero norm");

  // w_k = sum_j weighted_j G_{jk} over interior k, G the gradient stencil with w_0 = w_M = 0.
  const double h = 1.0 / (2.0 * dx);
  std::vector<double> full(static_cast<std::size_t>(M + 1), 0.0);
  full[1] += 4.0 * h * weighted[0];
  full[2] -= h * weighted[0];
  for (int j = 1; j < M; ++j) {
    full[static_cast<std::size_t>(j - 1)] -= h * weighted[static_cast<std::size_t>(j)];
    full[static_cast<std::size_t>(j + 1)] += h * weighted[static_cast<std::size_t>(j)];
  }
  full[static_cast<std::size_t>(M - 1)] -= 4.0 * h * weighted[static_cast<std::size_t>(M)];
  full[static_cast<std::size_t>(M - 2)] += h * weighted[static_cast<std::size_t>(M)];

  m.u.resize(static_cast<std::size_t>(m.n));
  m.w.resize(static_cast<std::size_t>(m.n));
  for (int i = 0; i < m.n; ++i) {
    m.u[static_cast<std::size_t>(i)] = -2.0 * lin.lambda * lin.slopes[static_cast<std::size_t>(i + 1)] / norm_sq;
    m.w[static_cast<std::size_t>(i)] = full[static_cast<std::size_t>(i + 1)];
  }
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) m(i, j) += m.u[static_cast<std::size_t>(i)] * m.w[static_cast<std::size_t>(j)];
  return m;
}

OperatorMatrix assemble_nonlocal(const phaseplane::StationaryProfile& profile, const GridSpec& grid,
                                 const BistableReaction& reaction) {
  return assemble_nonlocal(sample_profile(profile, grid), reaction);
}

std::vector<Complex> dense_eigenvalues(std::vector<double> a, int n, int max_sweeps_per_n) {
  require(n >= 1, "matrix must be non-empty");
  require(a.size() == static_cast<std::size_t>(n) * n, "matrix storage does not match n");
  for (double x : a)
    if (!std::isfinite(x)) fail(ErrorKind::Numeric, "matrix has non-finite entries");
  if (n == 1) return {Complex(a[0], 0.0)};
  balance(a, n);
  hessenberg(a, n);
  return hessenberg_qr(a, n, static_cast<long>(max_sweeps_per_n) * n);
}

int SpectrumReport::real_count_at_or_above(double threshold) const {
  int count = 0;
  for (const Complex& z : eigenvalues)
    if (is_real(z) && z.real() >= threshold) ++count;
  return count;
}

double SpectrumReport::max_abs_imag() const {
  double m = 0.0;
  for (const Complex& z : eigenvalues) m = std::max(m, std::abs(z.imag()));
  return m;
}

SpectrumReport make_report(std::vector<Complex> eigenvalues) {
  require(!eigenvalues.empty(), "empty spectrum");
  std::sort(eigenvalues.begin(), eigenvalues.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  SpectrumReport report;
  report.eigenvalues = std::move(eigenvalues);
  for (const Complex& z : report.eigenvalues) report.scale = std::max(report.scale, std::abs(z));
  report.rightmost = report.eigenvalues.front();
  report.rightmost_is_real = report.is_real(report.rightmost);
  report.real_nonnegative_count = report.real_count_at_or_above(0.0);
  report.gap = -report.rightmost.real();
  return report;
}

SpectrumReport eigenvalues(const OperatorMatrix& matrix) {
  require(matrix.n >= 2, "eigenvalues need n >= 2");
  return make_report(dense_eigenvalues(matrix.data, matrix.n));
}

bool Sector::contains(Complex z) const { return std::abs(std::arg(z - rho0)) > phi; }

CheckResult stability_checks(const SpectrumReport& report, Sector sector) {
  CheckResult result;
  result.sector = sector;

  Check nonneg{"no_real_nonnegative", true, "", {}};
  for (const Complex& z : report.eigenvalues)
    if (report.is_real(z) && z.real() >= 0.0) nonneg.offenders.push_back(z);
  nonneg.passed = nonneg.offenders.empty();
  nonneg.detail = std::to_string(nonneg.offenders.size()) + " real eigenvalues with Re >= 0";

  auto outside = [&](const Sector& s) {
    std::vector<Complex> out;
    for (const Complex& z : report.eigenvalues)
      if (!s.contains(z)) out.push_back(z);
    return out;
  };
  Check sector_check{"sector", true, "", outside(sector)};
  if (!sector_check.offenders.empty()) {
    const Sector wide{4.0 * sector.rho0, 0.5 * (sector.phi + 0.5 * std::numbers::pi)};
    auto wide_offenders = outside(wide);
    result.widened = true;
    result.sector = wide;
    sector_check.detail = std::to_string(sector_check.offenders.size()) + " outside the default sector; ";
    sector_check.offenders = std::move(wide_offenders);
  }
  sector_check.passed = sector_check.offenders.empty();
  sector_check.detail += std::to_string(sector_check.offenders.size()) + " outside rho0 = " +
                         fmt(result.sector.rho0) + ", phi = " + fmt(result.sector.phi);

  Check simple{"rightmost_real_negative_isolated", false, "", {}};
  const Complex s = report.rightmost;
  const bool negative = s.real() < 0.0;
  bool isolated = true;
  if (report.eigenvalues.size() > 1) {
    const double next = report.eigenvalues[1].real();
    isolated = next <= 10.0 * s.real() || s.real() - next > kIsolationMargin * std::max(1.0, std::abs(s.real()));
    simple.detail = "rightmost " + fmt(s) + ", next real part " + fmt(next);
  } else {
    simple.detail = "rightmost " + fmt(s);
  }
  simple.passed = report.rightmost_is_real && negative && isolated;
  if (!simple.passed) simple.offenders.push_back(s);
  if (!report.rightmost_is_real) simple.detail += "; not real";
  if (!negative) simple.detail += "; not negative";
  if (!isolated) simple.detail += "; not isolated";

  result.passed = nonneg.passed && sector_check.passed && simple.passed;
  result.checks = {std::move(nonneg), std::move(sector_check), std::move(simple)};
  return result;
}

std::vector<double> real_eigenvector(const OperatorMatrix& matrix, double eigenvalue, int iterations) {
  const int n = matrix.n;
  require(n >= 1, "empty operator");
  std::vector<double> a = matrix.data;
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  const double shift = eigenvalue + 1e-10 * std::max(1.0, std::abs(eigenvalue));
  for (int i = 0; i < n; ++i) a[idx(i, i, n)] -= shift;
  const auto piv = lu_factor(a, n);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = 1.0 + 0.01 * std::sin(1.0 + i);
  for (int it = 0; it < iterations; ++it) {
    lu_solve(a, piv, n, x);
    const double nx = norm2(x);
    if (!(nx > 0.0) || !std::isfinite(nx)) fail(ErrorKind::Numeric, "inverse iteration broke down");
    for (double& v : x) v /= nx;
  }
  std::size_t big = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs(x[i]) > std::abs(x[big])) big = i;
  if (x[big] < 0.0)
    for (double& v : x) v = -v;
  return x;
}

double cosine_similarity(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "vector lengths differ");
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  const double nx = norm2(x), ny = norm2(y);
  require(nx > 0.0 && ny > 0.0, "cosine of a zero vector");
  return std::abs(dot) / (nx * ny);
}

std::vector<double> interior(const std::vector<double>& nodes) {
  require(nodes.size() >= 3, "need at least 3 nodes");
  return {nodes.begin() + 1, nodes.end() - 1};
}

std::vector<GapRow> gap_vs_interval(const BistableReaction& reaction, const std::vector<double>& r_list, double dx,
                                    bool use_discrete_equilibrium) {
  std::vector<GapRow> rows;
  for (double r : r_list) {
    const auto profile = phaseplane::stationary_nonlocal(reaction, r);
    const GridSpec grid = grid_for(profile, dx);
    const Linearization lin =
        use_discrete_equilibrium ? discrete_equilibrium(profile, grid, reaction) : sample_profile(profile, grid);
    const auto nonlocal = eigenvalues(assemble_nonlocal(lin, reaction));
    const auto local = eigenvalues(assemble_local(lin, reaction));
    rows.push_back({r, nonlocal.rightmost.real(), local.rightmost.real(), profile.lambda_r});
  }
  return rows;
}

}  // namespace wavefreeze::spectrum
