#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace kpos {

/// Default absolute threshold below which a sample counts as zero.
inline constexpr double kZeroTol = 1e-12;
/// Default relative slack for the determinant-like shape inequalities.
inline constexpr double kShapeTol = 1e-9;

/// Finite-support real sequence on the integers.
///
/// Samples are stored densely for the window [start, start + size); every
/// time outside that window reads as zero. An empty signal is the zero signal.
class Signal {
 public:
  Signal() = default;
  Signal(std::int64_t start, std::vector<double> values);

  /// Samples at t = 0, 1, ..., values.size() - 1.
  static Signal from_values(std::vector<double> values) { return Signal(0, std::move(values)); }

  std::int64_t start() const { return start_; }
  /// One past the last stored time.
  std::int64_t end() const { return start_ + static_cast<std::int64_t>(values_.size()); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  /// Sample at time t; zero outside the stored window.
  double operator()(std::int64_t t) const;
  /// True when [first, last] lies inside the stored window.
  bool covers(std::int64_t first, std::int64_t last) const;

  std::span<const double> values() const { return values_; }

 private:
  std::int64_t start_ = 0;
  std::vector<double> values_;
};

/// Inclusive integer time interval.
struct Window {
  std::int64_t first = 0;
  std::int64_t last = 0;
};

/// Number of strict sign changes after deleting (near-)zero samples.
/// The zero sequence has variation 0.
int variation(std::span<const double> u, double zero_tol = kZeroTol);
inline int variation(const Signal& u, double zero_tol = kZeroTol) { return variation(u.values(), zero_tol); }

/// Sign of the earliest sample with |u| > zero_tol, or 0.
int first_nonzero_sign(std::span<const double> u, double zero_tol = kZeroTol);
inline int first_nonzero_sign(const Signal& u, double zero_tol = kZeroTol) {
  return first_nonzero_sign(u.values(), zero_tol);
}

/// k-th forward difference; the stored window shrinks by k samples.
/// Throws std::invalid_argument for k < 1.
Signal forward_difference(const Signal& u, int k);

/// S(forward_difference(u, 1)) <= 1.
bool is_unimodal(const Signal& u, double zero_tol = kZeroTol);

/// g(t+1)^2 - g(t) g(t+2) >= -tol * scale on every triple inside the window,
/// and the nonzero samples inside the window form an interval.
/// Throws std::domain_error when a sample in the window is negative.
bool is_log_concave(const Signal& g, Window window, double tol = kShapeTol, double zero_tol = kZeroTol);
/// Mirror of is_log_concave: g(t) g(t+2) - g(t+1)^2 >= -tol * scale.
bool is_log_convex(const Signal& g, Window window, double tol = kShapeTol, double zero_tol = kZeroTol);

}  // namespace kpos
