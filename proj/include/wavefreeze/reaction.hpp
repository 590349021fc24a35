#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wavefreeze::reaction {

enum class Kind { NagumoCubic, Custom };

/// Decay/growth rates of linearised tails: r1 < 0 toward the state 1 at +inf,
/// r2 > 0 away from the state 0 at -inf.
struct TailRates {
  double r1;
  double r2;
};

struct ValidationCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool all_passed() const;
  bool failed(const std::string& name) const;
  std::string summary() const;
};

/// Bistable nonlinearity f on [0,1]: f(0) = f(1) = 0, f'(0), f'(1) < 0 and a
/// single interior sign change at alpha. The object is immutable once built.
class BistableReaction {
 public:
  using Fn = std::function<double(double)>;

  /// f(u) = u (1 - u) (u - alpha). No validation here; see validate_bistable().
  static BistableReaction nagumo(double alpha);

  /// User supplied f and f' on [0,1]. Evaluating outside [0,1] is a domain error.
  static BistableReaction custom(Fn f, Fn f_prime, std::string name = "custom");

  /// f and f' sampled on a uniform grid of [0,1] (at least 2 samples each),
  /// interpolated by piecewise cubic Hermite polynomials.
  static BistableReaction tabulated(std::vector<double> f_samples, std::vector<double> f_prime_samples);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Meaningful for NagumoCubic; for Custom it is the located interior zero (NaN when none).
  double alpha() const { return alpha_; }

  double f(double u) const;
  double f_prime(double u) const;

  /// f(1 - w) evaluated without forming 1 - w when the closed form allows it;
  /// keeps relative accuracy as u -> 1.
  double f_near_one(double w) const;

  /// Like f() but linearly extended outside [0,1] for Custom kinds. Used by
  /// integrators whose trial stages may step marginally past an endpoint.
  double f_extended(double u) const;
  double f_near_one_extended(double w) const;

  double alpha_root() const { return alpha_root_; }
  double f_prime_0() const { return f_prime_0_; }
  double f_prime_1() const { return f_prime_1_; }
  /// I1 = integral of f over [0,1].
  double mass_integral() const { return mass_integral_; }
  /// max |f| over [0,1].
  double sup_norm() const { return sup_norm_; }

 private:
  BistableReaction() = default;
  void finalize();

  Kind kind_ = Kind::NagumoCubic;
  std::string name_;
  double alpha_ = 0.0;
  Fn f_;
  Fn f_prime_;

  double alpha_root_ = 0.0;
  double f_prime_0_ = 0.0;
  double f_prime_1_ = 0.0;
  double mass_integral_ = 0.0;
  double sup_norm_ = 0.0;
};

double eval_f(const BistableReaction& reaction, double u);
double eval_f_prime(const BistableReaction& reaction, double u);
double mass_integral(const BistableReaction& reaction);
double sup_norm_f(const BistableReaction& reaction);

/// Checks every bistability condition on a uniform grid; never throws for a
/// failed condition, the report carries it.
ValidationReport validate_bistable(const BistableReaction& reaction, int grid_points = 1024);

/// Roots of z^2 + c z + a = 0 with a = f'(1) (negative root) and a = f'(0)
/// (positive root). Throws Domain when f'(0) or f'(1) is not negative.
TailRates tail_rates(const BistableReaction& reaction, double c);

}  // namespace wavefreeze::reaction
