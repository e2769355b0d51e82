#include "kpos/signals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kpos {

Signal::Signal(std::int64_t start, std::vector<double> values) : start_(start), values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("Signal: non-finite sample");
  }
}

double Signal::operator()(std::int64_t t) const {
  if (t < start_ || t >= end()) return 0.0;
  return values_[static_cast<std::size_t>(t - start_)];
}

bool Signal::covers(std::int64_t first, std::int64_t last) const {
  if (last < first) return true;
  return first >= start_ && last < end();
}

int variation(std::span<const double> u, double zero_tol) {
  int changes = 0;
  int last_sign = 0;
  for (double v : u) {
    if (std::abs(v) <= zero_tol) continue;
    const int s = v > 0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

int first_nonzero_sign(std::span<const double> u, double zero_tol) {
  for (double v : u) {
    if (std::abs(v) > zero_tol) return v > 0 ? 1 : -1;
  }
  return 0;
}

Signal forward_difference(const Signal& u, int k) {
  if (k < 1) throw std::invalid_argument("forward_difference: order must be >= 1");
  std::vector<double> d(u.values().begin(), u.values().end());
  for (int step = 0; step < k; ++step) {
    if (d.empty()) break;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) d[i] = d[i + 1] - d[i];
    d.pop_back();
  }
  return Signal(u.start(), std::move(d));
}

bool is_unimodal(const Signal& u, double zero_tol) {
  return variation(forward_difference(u, 1), zero_tol) <= 1;
}

namespace {

// Shared body of the two log-shape predicates; `sign` = +1 tests concavity.
bool log_shape(const Signal& g, Window window, double tol, double zero_tol, int sign) {
  if (window.last < window.first) return true;
  bool seen_nonzero = false;
  bool closed = false;
  for (std::int64_t t = window.first; t <= window.last; ++t) {
    const double v = g(t);
    if (v < -zero_tol) {
      throw std::domain_error("log-shape test: negative sample at t=" + std::to_string(t));
    }
    const bool nonzero = v > zero_tol;
    if (nonzero && closed) return false;  // support has a gap
    if (nonzero) seen_nonzero = true;
    if (!nonzero && seen_nonzero) closed = true;
  }
  for (std::int64_t t = window.first; t + 2 <= window.last; ++t) {
    const double mid = g(t + 1) * g(t + 1);
    const double outer = g(t) * g(t + 2);
    const double scale = std::max(mid, std::abs(outer));
    if (sign * (mid - outer) < -tol * scale) return false;
  }
  return true;
}

}  // namespace

bool is_log_concave(const Signal& g, Window window, double tol, double zero_tol) {
  return log_shape(g, window, tol, zero_tol, +1);
}

bool is_log_convex(const Signal& g, Window window, double tol, double zero_tol) {
  return log_shape(g, window, tol, zero_tol, -1);
}

}  // namespace kpos
