#include "wavefreeze/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wavefreeze/errors.hpp"

namespace wavefreeze::reaction {

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kEndpointExclusion = 1e-9;

struct HermiteTable {
  std::vector<double> f;
  std::vector<double> df;

  // Locates the cell of u and the local coordinate t in [0,1].
  std::pair<std::size_t, double> locate(double u) const {
    const std::size_t cells = f.size() - 1;
    double s = u * static_cast<double>(cells);
    auto i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(cells - 1)));
    return {i, s - static_cast<double>(i)};
  }

  double value(double u) const {
    auto [i, t] = locate(u);
    const double h = 1.0 / static_cast<double>(f.size() - 1);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f[i] + (t3 - 2 * t2 + t) * h * df[i] + (-2 * t3 + 3 * t2) * f[i + 1] +
           (t3 - t2) * h * df[i + 1];
  }

  double derivative(double u) const {
    auto [i, t] = locate(u);
    const double h = 1.0 / static_cast<double>(f.size() - 1);
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * f[i] + (-6 * t2 + 6 * t) * f[i + 1]) / h + (3 * t2 - 4 * t + 1) * df[i] +
           (3 * t2 - 2 * t) * df[i + 1];
  }
};

double golden_section_max(const std::function<double(double)>& g, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  while (hi - lo > tol) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + inv_phi * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - inv_phi * (hi - lo);
      g1 = g(x1);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

BistableReaction BistableReaction::nagumo(double alpha) {
  if (!std::isfinite(alpha)) fail(ErrorKind::Precondition, "nagumo alpha must be finite");
  BistableReaction r;
  r.kind_ = Kind::NagumoCubic;
  r.alpha_ = alpha;
  std::ostringstream os;
  os.precision(17);
  os << "nagumo(alpha=" << alpha << ")";
  r.name_ = os.str();
  r.finalize();
  return r;
}

BistableReaction BistableReaction::custom(Fn f, Fn f_prime, std::string name) {
  require(static_cast<bool>(f) && static_cast<bool>(f_prime), "custom reaction needs both f and f'");
  BistableReaction r;
  r.kind_ = Kind::Custom;
  r.name_ = std::move(name);
  r.f_ = std::move(f);
  r.f_prime_ = std::move(f_prime);
  r.finalize();
  return r;
}

BistableReaction BistableReaction::tabulated(std::vector<double> f_samples, std::vector<double> f_prime_samples) {
  require(f_samples.size() >= 2, "tabulated reaction needs at least 2 samples");
  require(f_samples.size() == f_prime_samples.size(), "tabulated reaction: f and f' sample counts differ");
  auto table = std::make_shared<HermiteTable>(HermiteTable{std::move(f_samples), std::move(f_prime_samples)});
  return custom([table](double u) { return table->value(u); }, [table](double u) { return table->derivative(u); },
                "tabulated");
}

double BistableReaction::f(double u) const {
  if (kind_ == Kind::NagumoCubic) return u * (1.0 - u) * (u - alpha_);
  if (!(u >= 0.0 && u <= 1.0)) {
    std::ostringstream os;
    os << "custom reaction evaluated outside [0,1] at u=" << u;
    fail(ErrorKind::Domain, os.str());
  }
  return f_(u);
}

double BistableReaction::f_prime(double u) const {
  if (kind_ == Kind::NagumoCubic) return -3.0 * u * u + 2.0 * (1.0 + alpha_) * u - alpha_;
  if (!(u >= 0.0 && u <= 1.0)) {
    std::ostringstream os;
    os << "custom reaction derivative evaluated outside [0,1] at u=" << u;
    fail(ErrorKind::Domain, os.str());
  }
  return f_prime_(u);
}

double BistableReaction::f_near_one(double w) const {
  if (kind_ == Kind::NagumoCubic) return (1.0 - w) * w * ((1.0 - alpha_) - w);
  return f(1.0 - w);
}

double BistableReaction::f_extended(double u) const {
  if (kind_ == Kind::NagumoCubic) return f(u);
  if (u < 0.0) return f_(0.0) + f_prime_0_ * u;
  if (u > 1.0) return f_(1.0) + f_prime_1_ * (u - 1.0);
  return f_(u);
}

double BistableReaction::f_near_one_extended(double w) const {
  if (kind_ == Kind::NagumoCubic) return f_near_one(w);
  return f_extended(1.0 - w);
}

void BistableReaction::finalize() {
  if (kind_ == Kind::NagumoCubic) {
    alpha_root_ = alpha_;
    f_prime_0_ = -alpha_;
    f_prime_1_ = alpha_ - 1.0;
    mass_integral_ = (1.0 - 2.0 * alpha_) / 12.0;
  } else {
    f_prime_0_ = f_prime_(0.0);
    f_prime_1_ = f_prime_(1.0);

    // Interior zero: first - to + sign change on a scan grid, refined by bisection.
    alpha_root_ = std::numeric_limits<double>::quiet_NaN();
    constexpr int n = 1024;
    double prev_u = kEndpointExclusion;
    double prev_f = f_(prev_u);
    for (int i = 1; i <= n; ++i) {
      double u = (i == n) ? 1.0 - kEndpointExclusion : static_cast<double>(i) / n;
      double fu = f_(u);
      if (prev_f < 0.0 && fu >= 0.0) {
        double lo = prev_u, hi = u;
        for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
          double mid = 0.5 * (lo + hi);
          (f_(mid) < 0.0 ? lo : hi) = mid;
        }
        alpha_root_ = 0.5 * (lo + hi);
        break;
      }
      prev_u = u;
      prev_f = fu;
    }
    alpha_ = alpha_root_;

    double err = 0.0;
    mass_integral_ = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f_, 0.0, 1.0, 15, 1e-12, &err);
    if (!(err <= 1e-10)) {
      std::ostringstream os;
      os << "mass integral quadrature did not converge (error estimate " << err << ")";
      fail(ErrorKind::Numeric, os.str());
    }
  }

  // sup |f|: grid scan then golden-section refinement around the best node.
  constexpr int n = 1024;
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i <= n; ++i) {
    double v = std::abs(f(static_cast<double>(i) / n));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = std::max(0, best - 1) / static_cast<double>(n);
  double hi = std::min(n, best + 1) / static_cast<double>(n);
  auto abs_f = [this](double u) { return std::abs(f(u)); };
  double u_star = golden_section_max(abs_f, lo, hi, 1e-10);
  sup_norm_ = std::max(best_val, abs_f(u_star));
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

bool ValidationReport::failed(const std::string& name) const {
  return std::any_of(checks.begin(), checks.end(), [&](const ValidationCheck& c) { return c.name == name && !c.passed; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "[ok]   " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << '\n';
  }
  return os.str();
}

double eval_f(const BistableReaction& reaction, double u) { return reaction.f(u); }
double eval_f_prime(const BistableReaction& reaction, double u) { return reaction.f_prime(u); }
double mass_integral(const BistableReaction& reaction) { return reaction.mass_integral(); }
double sup_norm_f(const BistableReaction& reaction) { return reaction.sup_norm(); }

ValidationReport validate_bistable(const BistableReaction& reaction, int grid_points) {
  require(grid_points >= 16, "validate_bistable needs at least 16 grid points");
  ValidationReport report;
  auto add = [&](std::string name, bool ok, std::string detail = {}) {
    report.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  auto num = [](double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
  };

  const double f0 = reaction.f(0.0), f1 = reaction.f(1.0);
  add("f(0) = 0", std::abs(f0) <= kRootTol, "f(0)=" + num(f0));
  add("f(1) = 0", std::abs(f1) <= kRootTol, "f(1)=" + num(f1));
  add("f'(0) < 0", reaction.f_prime_0() < 0.0, "f'(0)=" + num(reaction.f_prime_0()));
  add("f'(1) < 0", reaction.f_prime_1() < 0.0, "f'(1)=" + num(reaction.f_prime_1()));

  const double alpha = reaction.alpha_root();
  const bool interior = std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0;
  add("interior zero in (0,1)", interior, "alpha=" + num(alpha));

  int neg_bad = 0, pos_bad = 0, neg_seen = 0, pos_seen = 0;
  double first_neg_bad = std::numeric_limits<double>::quiet_NaN();
  double first_pos_bad = first_neg_bad;
  for (int i = 0; i <= grid_points; ++i) {
    double u = static_cast<double>(i) / grid_points;
    u = std::clamp(u, kEndpointExclusion, 1.0 - kEndpointExclusion);
    if (interior && std::abs(u - alpha) < kEndpointExclusion) continue;
    const double fu = reaction.f(u);
    if (!interior || u < alpha) {
      ++neg_seen;
      if (!(fu < 0.0)) {
        if (neg_bad++ == 0) first_neg_bad = u;
      }
    } else {
      ++pos_seen;
      if (!(fu > 0.0)) {
        if (pos_bad++ == 0) first_pos_bad = u;
      }
    }
  }
  add("f < 0 on (0, alpha)", interior && neg_seen > 0 && neg_bad == 0,
      neg_bad ? "violated first at u=" + num(first_neg_bad) : std::string{});
  add("f > 0 on (alpha, 1)", interior && pos_seen > 0 && pos_bad == 0,
      pos_bad ? "violated first at u=" + num(first_pos_bad) : std::string{});
  return report;
}

TailRates tail_rates(const BistableReaction& reaction, double c) {
  const double a1 = reaction.f_prime_1();
  const double a0 = reaction.f_prime_0();
  if (!(a1 < 0.0) || !(a0 < 0.0)) fail(ErrorKind::Domain, "tail_rates requires f'(0) < 0 and f'(1) < 0");
  return {(-c - std::sqrt(c * c - 4.0 * a1)) / 2.0, (-c + std::sqrt(c * c - 4.0 * a0)) / 2.0};
}

}  // namespace wavefreeze::reaction
