#pragma once

#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "wavefreeze/errors.hpp"
#include "wavefreeze/grid.hpp"
#include "wavefreeze/phaseplane.hpp"
#include "wavefreeze/reaction.hpp"

/// Finite-difference linearizations around a stationary profile and a dense
/// nonsymmetric eigen-solver for them.
namespace wavefreeze::spectrum {

using reaction::BistableReaction;
using Complex = std::complex<double>;

enum class OperatorKind { Local, Nonlocal };

const char* to_string(OperatorKind kind);

/// Dense row-major n x n matrix on the interior nodes (Dirichlet rows eliminated).
/// For the nonlocal kind, `u` and `w` hold the rank-one correction u w^T.
struct OperatorMatrix {
  int n = 0;
  std::vector<double> data;
  OperatorKind kind = OperatorKind::Local;
  GridSpec grid;
  double lambda_r = 0.0;
  std::vector<double> u;
  std::vector<double> w;

  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * n + j]; }
  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * n + j]; }
  std::vector<double> apply(const std::vector<double>& x) const;
};

/// Node data the operators are built from: speed, values and slopes at all M+1 nodes.
struct Linearization {
  GridSpec grid;
  double lambda = 0.0;
  std::vector<double> values;
  std::vector<double> slopes;
};

/// Samples the profile at the grid nodes. Throws Domain when the grid does not
/// span the profile's interval.
Linearization sample_profile(const phaseplane::StationaryProfile& profile, const GridSpec& grid);

/// Uses the equilibrium of the semi-discrete frozen equation (potential functional)
/// near the sampled profile instead, with slopes from the discrete gradient.
/// The nonlocal matrix is then the exact Jacobian of the discrete system.
Linearization discrete_equilibrium(const phaseplane::StationaryProfile& profile, const GridSpec& grid,
                                   const BistableReaction& reaction);

/// Grid on the profile's interval with spacing as close to dx as an integer cell count allows.
GridSpec grid_for(const phaseplane::StationaryProfile& profile, double dx);

/// w'' + lambda w' + f'(Phi) w with centred differences.
OperatorMatrix assemble_local(const Linearization& lin, const BistableReaction& reaction);
OperatorMatrix assemble_local(const phaseplane::StationaryProfile& profile, const GridSpec& grid,
                              const BistableReaction& reaction);

/// Local part plus u w^T with u = -2 lambda Phi' / |Phi'|^2 and
/// w^T x = <x_x, Phi'> (discrete gradient, trapezoid weights).
OperatorMatrix assemble_nonlocal(const Linearization& lin, const BistableReaction& reaction);
OperatorMatrix assemble_nonlocal(const phaseplane::StationaryProfile& profile, const GridSpec& grid,
                                 const BistableReaction& reaction);

/// Thrown when the QR iteration runs out of sweeps. `partial` holds the
/// eigenvalues deflated so far.
class QrNonConvergence : public Error {
 public:
  QrNonConvergence(const std::string& what, std::vector<Complex> partial)
      : Error(ErrorKind::Numeric, what), partial_(std::move(partial)) {}
  const std::vector<Complex>& partial() const { return partial_; }

 private:
  std::vector<Complex> partial_;
};

/// Eigenvalues of a dense real n x n row-major matrix: balancing, Householder
/// reduction to Hessenberg form, Francis double-shift QR with deflation.
/// Unordered.
std::vector<Complex> dense_eigenvalues(std::vector<double> a, int n, int max_sweeps_per_n = 50);

constexpr double kRealTolerance = 1e-8;  // |Im| <= kRealTolerance * max |eigenvalue| counts as real

struct SpectrumReport {
  std::vector<Complex> eigenvalues;  // descending real part
  Complex rightmost;
  double scale = 0.0;  // max |eigenvalue|
  bool rightmost_is_real = false;
  int real_nonnegative_count = 0;
  double gap = 0.0;  // -Re(rightmost)

  bool is_real(Complex z) const { return std::abs(z.imag()) <= kRealTolerance * scale; }
  int real_count_at_or_above(double threshold) const;
  double max_abs_imag() const;
};

SpectrumReport make_report(std::vector<Complex> eigenvalues);
SpectrumReport eigenvalues(const OperatorMatrix& matrix);

struct Sector {
  double rho0 = 1.0;
  double phi = 0.75 * std::numbers::pi;

  /// |Arg(z - rho0)| > phi
  bool contains(Complex z) const;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
  std::vector<Complex> offenders;
};

struct CheckResult {
  bool passed = false;
  Sector sector;          // the sector check (2) was finally evaluated against
  bool widened = false;   // the default sector failed and the widened one was used
  std::vector<Check> checks;
};

/// (1) no real eigenvalue >= 0; (2) all eigenvalues in the sector, retried once
/// with rho0 * 4 and phi halfway to pi/2; (3) the rightmost eigenvalue is real,
/// negative and isolated: the next real part is at least 10 times further
/// left, or lies below it by more than kIsolationMargin * max(1, |s|).
constexpr double kIsolationMargin = 1e-3;
CheckResult stability_checks(const SpectrumReport& report, Sector sector = {});

/// Eigenvector for a real eigenvalue by inverse iteration with dense LU, unit 2-norm.
std::vector<double> real_eigenvector(const OperatorMatrix& matrix, double eigenvalue, int iterations = 4);

/// |cos| of the angle between two vectors.
double cosine_similarity(const std::vector<double>& x, const std::vector<double>& y);

/// Interior samples of Phi' used by the matrix.
std::vector<double> interior(const std::vector<double>& nodes);

struct GapRow {
  double r;
  double s_r;        // rightmost eigenvalue of the nonlocal matrix (real part)
  double s_r_local;  // rightmost eigenvalue of the local matrix (real part)
  double lambda_r;
};

/// For each r: stationary solve, both operators on a grid with spacing dx, rightmost eigenvalues.
std::vector<GapRow> gap_vs_interval(const BistableReaction& reaction, const std::vector<double>& r_list, double dx,
                                    bool use_discrete_equilibrium = false);

}  // namespace wavefreeze::spectrum
