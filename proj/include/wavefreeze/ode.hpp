#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace wavefreeze::ode {

/// Error-control settings for the embedded Dormand-Prince 5(4) pair.
struct Tolerance {
  double rtol = 1e-10;
  double atol = 1e-12;
};

/// One Dormand-Prince 5(4) step with Hairer's fourth-order continuous
/// extension. State is a small fixed-size array; the right-hand side is any
/// callable `void(const State&, State&)` (the systems here are autonomous).
template <std::size_t N>
class DormandPrince {
 public:
  using State = std::array<double, N>;

  /// Attempts a step of size h from y0 (with k1 = rhs(y0) already known).
  /// Returns the scaled RMS error estimate; y1 / k7 / dense data are valid
  /// only when the caller accepts the step.
  template <class Rhs>
  double attempt(Rhs&& rhs, const State& y0, const State& k1, double h, const std::array<double, N>& atol,
                 double rtol) {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                     a65 = -5103.0 / 18656.0;
    constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                     a76 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                     e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    State tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y0[i] + h * a21 * k1[i];
    rhs(tmp, k2_);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y0[i] + h * (a31 * k1[i] + a32 * k2_[i]);
    rhs(tmp, k3_);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y0[i] + h * (a41 * k1[i] + a42 * k2_[i] + a43 * k3_[i]);
    rhs(tmp, k4_);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y0[i] + h * (a51 * k1[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    rhs(tmp, k5_);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y0[i] + h * (a61 * k1[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
    rhs(tmp, k6_);
    for (std::size_t i = 0; i < N; ++i)
      y1_[i] = y0[i] + h * (a71 * k1[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
    rhs(y1_, k7_);

    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double err = h * (e1 * k1[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
      const double scale = atol[i] + rtol * std::max(std::abs(y0[i]), std::abs(y1_[i]));
      sum += (err / scale) * (err / scale);
    }

    y0_ = y0;
    k1_ = k1;
    h_ = h;
    return std::sqrt(sum / static_cast<double>(N));
  }

  const State& y1() const { return y1_; }
  const State& k7() const { return k7_; }

  /// Continuous extension at fraction s in [0,1] of the last attempted step.
  State dense(double s) const {
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    State out;
    const double s1 = 1.0 - s;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = y1_[i] - y0_[i];
      const double bspl = h_ * k1_[i] - ydiff;
      const double r4 = ydiff - h_ * k7_[i] - bspl;
      const double r5 =
          h_ * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] + d7 * k7_[i]);
      out[i] = y0_[i] + s * (ydiff + s1 * (bspl + s * (r4 + s1 * r5)));
    }
    return out;
  }

 private:
  State y0_{}, y1_{}, k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{}, k7_{};
  double h_ = 0.0;
};

/// Standard step-size update for an order-5 method with error exponent 1/5.
inline double next_step_factor(double err, double safety = 0.9, double fac_min = 0.2, double fac_max = 5.0) {
  if (err == 0.0) return fac_max;
  return std::clamp(safety * std::pow(err, -0.2), fac_min, fac_max);
}

}  // namespace wavefreeze::ode
