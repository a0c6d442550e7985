#pragma once

// Adaptive Dormand-Prince 5(4) integration of planar vector fields with
// fourth-order dense output and guard-crossing (event) location.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regionkit/errors.hpp"
#include "regionkit/state.hpp"

namespace regionkit {

struct ToleranceSettings {
  double relative = 1e-13;
  double absolute = 1e-12;
  double max_step = 1.0;
  double event_refine = 1e-12;

  void validate() const {
    const double eps = std::numeric_limits<double>::epsilon();
    if (!(relative >= 10.0 * eps) || !(absolute > 0.0) || !(max_step > 0.0) ||
        !(event_refine > 0.0))
      throw Error(ErrorCode::InvalidArgument,
                  "tolerances must be positive with relative >= 10 * machine epsilon");
  }
};

/// One accepted step together with its continuous extension.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<State, 5> coeff{};

  State at(double t) const {
    const double theta = (t - t0) / h;
    const double theta1 = 1.0 - theta;
    return coeff[0] +
           theta * (coeff[1] + theta1 * (coeff[2] + theta * (coeff[3] + theta1 * coeff[4])));
  }
};

struct Sample {
  double t;
  State state;
};

/// Accepted steps of one integration run. samples[i] and samples[i+1] bracket
/// steps[i]; at() interpolates anywhere in [front().t, back().t].
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::string field_id) : field_id_(std::move(field_id)) {}

  const std::string& field_id() const noexcept { return field_id_; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  const std::vector<DenseStep>& steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const Sample& front() const { return samples_.front(); }
  const Sample& back() const { return samples_.back(); }
  double start_time() const { return samples_.front().t; }
  double end_time() const { return samples_.back().t; }

  State at(double t) const {
    if (steps_.empty()) return samples_.front().state;
    if (t <= samples_.front().t) return samples_.front().state;
    if (t >= samples_.back().t) return samples_.back().state;
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double value, const Sample& s) { return value < s.t; });
    const auto index = static_cast<std::size_t>(std::distance(samples_.begin(), it)) - 1;
    return steps_[std::min(index, steps_.size() - 1)].at(t);
  }

  /// n >= 2 states at uniformly spaced times from start to end, endpoints exact.
  std::vector<State> resample(std::size_t n) const {
    std::vector<State> out;
    out.reserve(n);
    const double t0 = start_time(), t1 = end_time();
    out.push_back(front().state);
    for (std::size_t i = 1; i + 1 < n; ++i)
      out.push_back(at(t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1)));
    out.push_back(back().state);
    return out;
  }

  void start(double t, State s) {
    samples_.clear();
    steps_.clear();
    samples_.push_back({t, s});
  }
  void append(const DenseStep& step, double t, State s) {
    steps_.push_back(step);
    samples_.push_back({t, s});
  }
  /// Cuts the run at time t inside the last step, replacing the final sample.
  void truncate_last(double t, State s) { samples_.back() = {t, s}; }

 private:
  std::string field_id_;
  std::vector<Sample> samples_;
  std::vector<DenseStep> steps_;
};

enum class Direction { Rising, Falling, Either };

struct EventSpec {
  std::function<double(State)> guard;
  Direction direction = Direction::Either;
  bool terminal = true;
};

struct EventHit {
  std::size_t event_index = 0;
  double t = 0.0;
  State state;
};

enum class IntegrationStatus { Completed, Terminated, StepSizeUnderflow, NonFiniteState };

struct IntegrationResult {
  Trajectory trajectory;
  IntegrationStatus status = IntegrationStatus::Completed;
  std::vector<EventHit> hits;
};

namespace detail {

// Dormand & Prince (1980) coefficients; dense output after Hairer, Norsett
// and Wanner.
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

inline double error_ratio(State err, State y0, State y1, const ToleranceSettings& tol) {
  const double s1 = tol.absolute + tol.relative * std::max(std::abs(y0.x1), std::abs(y1.x1));
  const double s2 = tol.absolute + tol.relative * std::max(std::abs(y0.x2), std::abs(y1.x2));
  return std::max(std::abs(err.x1) / s1, std::abs(err.x2) / s2);
}

template <class Field>
double initial_step(Field& f, State y0, State f0, const ToleranceSettings& tol) {
  auto rms = [&](State v, State ref) {
    const double s1 = tol.absolute + tol.relative * std::abs(ref.x1);
    const double s2 = tol.absolute + tol.relative * std::abs(ref.x2);
    return std::sqrt(0.5 * ((v.x1 / s1) * (v.x1 / s1) + (v.x2 / s2) * (v.x2 / s2)));
  };
  const double dn0 = rms(y0, y0), dn1 = rms(f0, y0);
  double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
  h0 = std::min(h0, tol.max_step);
  const State f1 = f(y0 + h0 * f0);
  const double dn2 = rms(f1 - f0, y0) / h0;
  const double dmax = std::max(dn1, dn2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, tol.max_step});
}

inline bool crosses(double g0, double g1, Direction dir) {
  const bool rising = g0 < 0.0 && g1 >= 0.0;
  const bool falling = g0 > 0.0 && g1 <= 0.0;
  switch (dir) {
    case Direction::Rising: return rising;
    case Direction::Falling: return falling;
    case Direction::Either: return rising || falling;
  }
  return false;
}

/// Bisection on the dense output; returns the bracket end with smaller |g|.
inline std::pair<double, State> locate(const DenseStep& step, double t_lo, double t_hi,
                                       State y_hi, const std::function<double(State)>& guard,
                                       double g_lo) {
  State s_lo = step.at(t_lo);
  State s_hi = y_hi;
  double g_hi = guard(s_hi);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (mid <= t_lo || mid >= t_hi) break;
    const State s_mid = step.at(mid);
    const double g_mid = guard(s_mid);
    if ((g_mid < 0.0) == (g_lo < 0.0) && g_mid != 0.0) {
      t_lo = mid, s_lo = s_mid, g_lo = g_mid;
    } else {
      t_hi = mid, s_hi = s_mid, g_hi = g_mid;
    }
    if (g_mid == 0.0) break;
  }
  return std::abs(g_lo) < std::abs(g_hi) ? std::pair{t_lo, s_lo} : std::pair{t_hi, s_hi};
}

}  // namespace detail

/// Integrates field from s0 over [t_span.first, t_span.second]. Failures are
/// reported through the status with the trajectory accepted so far; terminal
/// events stop the run at the located crossing.
template <class Field>
IntegrationResult integrate_partial(Field&& field, State s0, std::pair<double, double> t_span,
                                    const ToleranceSettings& tol,
                                    std::span<const EventSpec> events = {},
                                    std::string field_id = {}) {
  using namespace detail;
  tol.validate();
  const auto [t_begin, t_end] = t_span;
  if (!(t_end > t_begin))
    throw Error(ErrorCode::InvalidArgument, "time span must be increasing");

  IntegrationResult result{Trajectory(std::move(field_id)), IntegrationStatus::Completed, {}};
  Trajectory& traj = result.trajectory;
  traj.start(t_begin, s0);
  if (!is_finite(s0)) {
    result.status = IntegrationStatus::NonFiniteState;
    return result;
  }

  State y = s0;
  double t = t_begin;
  State k1 = field(y);
  if (!is_finite(k1)) {
    result.status = IntegrationStatus::NonFiniteState;
    return result;
  }

  std::vector<double> g_prev(events.size());
  std::vector<bool> armed(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    g_prev[i] = events[i].guard(y);
    armed[i] = std::abs(g_prev[i]) > tol.event_refine;
  }

  double h = initial_step(field, y, k1, tol);
  bool last_rejected = false;
  const double eps = std::numeric_limits<double>::epsilon();

  while (t < t_end) {
    if (t + h > t_end || t + 1.01 * h >= t_end) h = t_end - t;
    if (h < 10.0 * eps * std::max(1.0, std::abs(t))) {
      result.status = IntegrationStatus::StepSizeUnderflow;
      return result;
    }

    const State k2 = field(y + h * (a21 * k1));
    const State k3 = field(y + h * (a31 * k1 + a32 * k2));
    const State k4 = field(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = field(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = field(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const State k7 = field(y_new);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double ratio = error_ratio(err, y, y_new, tol);

    if (!std::isfinite(ratio) || !is_finite(k7)) {
      h *= 0.2;
      last_rejected = true;
      if (h < 10.0 * eps * std::max(1.0, std::abs(t))) {
        result.status = IntegrationStatus::NonFiniteState;
        return result;
      }
      continue;
    }
    if (ratio > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(ratio, -0.2));
      last_rejected = true;
      continue;
    }

    DenseStep step;
    step.t0 = t;
    step.h = h;
    const State dy = y_new - y;
    step.coeff[0] = y;
    step.coeff[1] = dy;
    step.coeff[2] = h * k1 - dy;
    step.coeff[3] = dy - h * k7 - step.coeff[2];
    step.coeff[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

    const double t_new = (h == t_end - t) ? t_end : t + h;
    traj.append(step, t_new, y_new);

    // Earliest terminal crossing inside this step wins.
    std::optional<EventHit> terminal_hit;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const double g_new = events[i].guard(y_new);
      if (armed[i] && detail::crosses(g_prev[i], g_new, events[i].direction)) {
        auto [t_hit, s_hit] = detail::locate(step, t, t_new, y_new, events[i].guard, g_prev[i]);
        EventHit hit{i, t_hit, s_hit};
        if (events[i].terminal) {
          if (!terminal_hit || t_hit < terminal_hit->t) terminal_hit = hit;
        } else {
          result.hits.push_back(hit);
        }
      }
      g_prev[i] = g_new;
      armed[i] = true;
    }
    if (terminal_hit) {
      std::erase_if(result.hits, [&](const EventHit& e) { return e.t > terminal_hit->t; });
      result.hits.push_back(*terminal_hit);
      traj.truncate_last(terminal_hit->t, terminal_hit->state);
      result.status = IntegrationStatus::Terminated;
      return result;
    }

    t = t_new;
    y = y_new;
    k1 = k7;
    double factor = std::clamp(0.9 * std::pow(std::max(ratio, 1e-10), -0.2), 0.2, 5.0);
    if (last_rejected) factor = std::min(factor, 1.0);
    last_rejected = false;
    h = std::min(h * factor, tol.max_step);
  }
  return result;
}

namespace detail {
inline void raise_on_failure(IntegrationStatus status, std::string_view what) {
  if (status == IntegrationStatus::StepSizeUnderflow)
    throw Error(ErrorCode::StepSizeUnderflow, std::string(what));
  if (status == IntegrationStatus::NonFiniteState)
    throw Error(ErrorCode::NonFiniteState, std::string(what));
}

template <class Field>
std::string field_name() {
  if constexpr (requires { std::remove_cvref_t<Field>::id; })
    return std::string(std::remove_cvref_t<Field>::id);
  else
    return "field";
}
}  // namespace detail

template <class Field>
Trajectory integrate(Field&& field, State s0, std::pair<double, double> t_span,
                     const ToleranceSettings& tol = {}) {
  if (!is_finite(s0)) throw Error(ErrorCode::NonFiniteState, "initial state is not finite");
  auto result = integrate_partial(field, s0, t_span, tol, {}, detail::field_name<Field>());
  detail::raise_on_failure(result.status, "integration failed");
  return std::move(result.trajectory);
}

struct EventResult {
  Trajectory trajectory;
  State hit;
  double t_hit;
};

/// Integrates from t = 0 until event.guard crosses zero in event.direction.
/// A start on the zero set arms detection only after the first step.
template <class Field>
EventResult integrate_until_event(Field&& field, State s0, const EventSpec& event, double t_max,
                                  const ToleranceSettings& tol = {}) {
  if (!is_finite(s0)) throw Error(ErrorCode::NonFiniteState, "initial state is not finite");
  EventSpec terminal = event;
  terminal.terminal = true;
  auto result = integrate_partial(field, s0, {0.0, t_max}, tol, std::span(&terminal, 1),
                                  detail::field_name<Field>());
  detail::raise_on_failure(result.status, "integration failed before the event");
  if (result.status != IntegrationStatus::Terminated)
    throw Error(ErrorCode::EventNotReached,
                "guard not crossed within t_max = " + std::to_string(t_max));
  const EventHit hit = result.hits.back();
  return {std::move(result.trajectory), hit.state, hit.t};
}

}  // namespace regionkit
