#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "homolab/detail/dop853_tableau.hpp"

namespace homolab {

/// Explicit Dormand-Prince 8(5,3) stepper with 7th-order dense output,
/// parameterized on the working precision.
///
/// Each call to step() advances by exactly one accepted step; rejected
/// attempts are retried internally. Between steps, dense() interpolates
/// anywhere on the last accepted interval. Step control follows Hairer's
/// DOP853: blended 5th/3rd-order error estimate, safety 0.9, factor in
/// [0.2, 10], exponent -1/8.
template <class Real>
class BasicDop853 {
 public:
  using Rhs = std::function<void(Real t, std::span<const Real> y, std::span<Real> dydt)>;

  enum class StepStatus { ok, step_too_small };

  BasicDop853(Rhs rhs, Real t0, std::vector<Real> y0, Real rel_tol, Real abs_tol,
              Real max_step = std::numeric_limits<Real>::infinity())
      : rhs_(std::move(rhs)),
        rel_tol_(rel_tol),
        abs_tol_(abs_tol),
        max_step_(max_step),
        dimension_(y0.size()),
        t_(t0),
        t_old_(t0),
        y_(std::move(y0)),
        y_old_(y_),
        f_(dimension_),
        k_(detail::dop853::kStagesExtended, std::vector<Real>(dimension_)),
        scratch_(dimension_) {
    rhs_(t_, y_, f_);
    ++evaluations_;
  }

  /// Advance one accepted step without passing `t_bound`.
  StepStatus step(Real t_bound);

  Real time() const noexcept { return t_; }
  Real previous_time() const noexcept { return t_old_; }
  const std::vector<Real>& state() const noexcept { return y_; }

  /// Interpolated state at t in [previous_time(), time()]. The first call
  /// after a step costs three extra right-hand-side evaluations.
  std::vector<Real> dense(Real t);

  std::size_t accepted_steps() const noexcept { return accepted_; }
  std::size_t rejected_steps() const noexcept { return rejected_; }
  std::size_t rhs_evaluations() const noexcept { return evaluations_; }

 private:
  static constexpr Real coef(long double x) { return static_cast<Real>(x); }

  Real initial_step(Real t_bound);
  Real error_norm(Real h) const;
  void build_dense_output();

  Rhs rhs_;
  Real rel_tol_;
  Real abs_tol_;
  Real max_step_;
  std::size_t dimension_;
  Real t_;
  Real t_old_;
  Real h_ = 0;
  Real h_prev_ = 0;
  std::vector<Real> y_;
  std::vector<Real> y_old_;
  std::vector<Real> f_;
  std::vector<std::vector<Real>> k_;
  std::vector<Real> scratch_;
  std::vector<std::vector<Real>> interp_;
  Real direction_ = 1;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  std::size_t evaluations_ = 0;
};

namespace detail {

template <class Real>
Real rms(std::span<const Real> v) {
  Real sum = 0;
  for (Real x : v) sum += x * x;
  return v.empty() ? Real(0) : std::sqrt(sum / static_cast<Real>(v.size()));
}

}  // namespace detail

template <class Real>
Real BasicDop853<Real>::initial_step(Real t_bound) {
  using std::abs;
  const Real interval = abs(t_bound - t_);
  if (dimension_ == 0) return interval;
  std::vector<Real> scaled(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) scaled[i] = y_[i] / (abs_tol_ + abs(y_[i]) * rel_tol_);
  const Real d0 = detail::rms<Real>(scaled);
  for (std::size_t i = 0; i < dimension_; ++i) scaled[i] = f_[i] / (abs_tol_ + abs(y_[i]) * rel_tol_);
  const Real d1 = detail::rms<Real>(scaled);
  Real h0 = (d0 < Real(1e-5) || d1 < Real(1e-5)) ? Real(1e-6) : Real(0.01) * d0 / d1;
  h0 = std::min(h0, interval);

  std::vector<Real> y1(dimension_), f1(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) y1[i] = y_[i] + h0 * direction_ * f_[i];
  rhs_(t_ + h0 * direction_, y1, f1);
  ++evaluations_;
  for (std::size_t i = 0; i < dimension_; ++i) scaled[i] = (f1[i] - f_[i]) / (abs_tol_ + abs(y_[i]) * rel_tol_);
  const Real d2 = detail::rms<Real>(scaled) / h0;

  Real h1 = 0;
  if (d1 <= Real(1e-15) && d2 <= Real(1e-15)) {
    h1 = std::max(Real(1e-6), h0 * Real(1e-3));
  } else {
    h1 = std::pow(Real(0.01) / std::max(d1, d2), Real(1) / Real(8));
  }
  return std::min({Real(100) * h0, h1, interval, max_step_});
}

template <class Real>
Real BasicDop853<Real>::error_norm(Real h) const {
  using std::abs;
  namespace tab = detail::dop853;
  Real err5_sq = 0;
  Real err3_sq = 0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    const Real scale = abs_tol_ + std::max(abs(y_old_[i]), abs(y_[i])) * rel_tol_;
    Real e3 = 0;
    Real e5 = 0;
    for (int s = 0; s <= tab::kStages; ++s) {
      e3 += coef(tab::e3[s]) * k_[s][i];
      e5 += coef(tab::e5[s]) * k_[s][i];
    }
    e3 /= scale;
    e5 /= scale;
    err3_sq += e3 * e3;
    err5_sq += e5 * e5;
  }
  if (err5_sq == 0 && err3_sq == 0) return 0;
  const Real denom = err5_sq + Real(0.01) * err3_sq;
  return abs(h) * err5_sq / std::sqrt(denom * static_cast<Real>(dimension_));
}

template <class Real>
typename BasicDop853<Real>::StepStatus BasicDop853<Real>::step(Real t_bound) {
  using std::abs;
  namespace tab = detail::dop853;
  constexpr Real kSafety = Real(0.9);
  constexpr Real kMinFactor = Real(0.2);
  constexpr Real kMaxFactor = Real(10);
  constexpr Real kErrorExponent = Real(-1) / Real(8);

  direction_ = t_bound >= t_ ? Real(1) : Real(-1);
  if (h_ == 0) h_ = initial_step(t_bound);
  const Real min_step = Real(10) * abs(std::nextafter(t_, direction_ * std::numeric_limits<Real>::infinity()) - t_);
  Real h_abs = std::min(h_, max_step_);
  if (h_abs < min_step) h_abs = min_step;

  const std::vector<Real> y_start = y_;
  bool rejected = false;
  while (true) {
    if (h_abs < min_step) return StepStatus::step_too_small;
    Real t_new = t_ + h_abs * direction_;
    if (direction_ * (t_new - t_bound) > 0) t_new = t_bound;
    const Real h = t_new - t_;
    h_abs = abs(h);

    k_[0] = f_;
    for (int s = 1; s < tab::kStages; ++s) {
      for (std::size_t i = 0; i < dimension_; ++i) {
        Real dy = 0;
        for (int j = 0; j < s; ++j) dy += coef(tab::a[s][j]) * k_[j][i];
        scratch_[i] = y_start[i] + h * dy;
      }
      rhs_(t_ + coef(tab::c[s]) * h, scratch_, k_[s]);
    }
    std::vector<Real> y_new(dimension_);
    for (std::size_t i = 0; i < dimension_; ++i) {
      Real dy = 0;
      for (int j = 0; j < tab::kStages; ++j) dy += coef(tab::a[tab::kStages][j]) * k_[j][i];
      y_new[i] = y_start[i] + h * dy;
    }
    rhs_(t_new, y_new, k_[tab::kStages]);
    evaluations_ += tab::kStages;

    y_old_ = y_start;
    y_ = std::move(y_new);
    const Real err = error_norm(h);

    if (err < 1) {
      Real factor = err == 0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err, kErrorExponent));
      if (rejected) factor = std::min(Real(1), factor);
      h_prev_ = h;
      h_ = h_abs * factor;
      t_old_ = t_;
      t_ = t_new;
      f_ = k_[tab::kStages];
      interp_.clear();
      ++accepted_;
      return StepStatus::ok;
    }
    // NaN errors (non-finite stages) land here too and shrink the step.
    h_abs *= std::isfinite(err) ? std::max(kMinFactor, kSafety * std::pow(err, kErrorExponent)) : kMinFactor;
    y_ = y_start;
    rejected = true;
    ++rejected_;
  }
}

template <class Real>
void BasicDop853<Real>::build_dense_output() {
  namespace tab = detail::dop853;
  const Real h = h_prev_;
  for (int s = tab::kStages + 1; s < tab::kStagesExtended; ++s) {
    for (std::size_t i = 0; i < dimension_; ++i) {
      Real dy = 0;
      for (int j = 0; j < s; ++j) dy += coef(tab::a[s][j]) * k_[j][i];
      scratch_[i] = y_old_[i] + h * dy;
    }
    rhs_(t_old_ + coef(tab::c[s]) * h, scratch_, k_[s]);
    ++evaluations_;
  }
  interp_.assign(tab::kInterpolatorPower, std::vector<Real>(dimension_));
  const auto& f_old = k_[0];
  const auto& f_new = k_[tab::kStages];
  for (std::size_t i = 0; i < dimension_; ++i) {
    const Real delta = y_[i] - y_old_[i];
    interp_[0][i] = delta;
    interp_[1][i] = h * f_old[i] - delta;
    interp_[2][i] = Real(2) * delta - h * (f_new[i] + f_old[i]);
    for (int r = 0; r < tab::kInterpolatorPower - 3; ++r) {
      Real sum = 0;
      for (int s = 0; s < tab::kStagesExtended; ++s) sum += coef(tab::d[r][s]) * k_[s][i];
      interp_[3 + r][i] = h * sum;
    }
  }
}

template <class Real>
std::vector<Real> BasicDop853<Real>::dense(Real t) {
  namespace tab = detail::dop853;
  if (t == t_) return y_;
  if (interp_.empty()) build_dense_output();
  const Real x = (t - t_old_) / h_prev_;
  std::vector<Real> y(dimension_, Real(0));
  for (int r = tab::kInterpolatorPower - 1, parity = 0; r >= 0; --r, ++parity) {
    const Real mult = parity % 2 == 0 ? x : Real(1) - x;
    for (std::size_t i = 0; i < dimension_; ++i) y[i] = (y[i] + interp_[r][i]) * mult;
  }
  for (std::size_t i = 0; i < dimension_; ++i) y[i] += y_old_[i];
  return y;
}

using Dop853 = BasicDop853<double>;

}  // namespace homolab
