#include "kpos/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "kpos/error.hpp"
#include "kpos/format.hpp"

namespace kpos {

namespace {

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

OperatorTruncation truncate_operator(const Signal& g, OperatorKind kind, int L, int N) {
  if (L < 1 || N < 1) throw std::invalid_argument("truncate_operator: L and N must be >= 1");
  OperatorTruncation op{kind, L, N, Eigen::MatrixXd::Zero(N, L)};
  if (kind == OperatorKind::Hankel) {
    if (!g.covers(1, N + L - 1)) throw std::out_of_range("truncate_operator: impulse response too short");
    for (int t = 0; t < N; ++t)
      for (int b = 0; b < L; ++b) op.matrix(t, b) = g(t + b + 1);
  } else {
    if (!g.covers(0, N - 1)) throw std::out_of_range("truncate_operator: impulse response too short");
    for (int t = 0; t < N; ++t)
      for (int s = 0; s < L && s <= t; ++s) op.matrix(t, s) = g(t - s);
  }
  return op;
}

Signal apply_hankel(const Signal& g, const Signal& past, int N) {
  if (N < 1) throw std::invalid_argument("apply_hankel: N must be >= 1");
  std::vector<double> y(static_cast<std::size_t>(N), 0.0);
  for (std::int64_t tau = 1; -tau >= past.start(); ++tau) {
    const double u = past(-tau);
    if (u == 0.0) continue;
    for (int t = 0; t < N; ++t) {
      if (!g.covers(t + tau, t + tau)) throw std::out_of_range("apply_hankel: impulse response too short");
      y[static_cast<std::size_t>(t)] += g(t + tau) * u;
    }
  }
  return Signal::from_values(std::move(y));
}

Signal apply_hankel(const Signal& g, const std::vector<double>& past, int N) {
  std::vector<double> values(past.rbegin(), past.rend());  // u(-L), ..., u(-1)
  return apply_hankel(g, Signal(-static_cast<std::int64_t>(past.size()), std::move(values)), N);
}

Signal apply_toeplitz(const Signal& g, const Signal& u, int N) {
  if (N < 1) throw std::invalid_argument("apply_toeplitz: N must be >= 1");
  if (!g.covers(0, N - 1)) throw std::out_of_range("apply_toeplitz: impulse response too short");
  std::vector<double> y(static_cast<std::size_t>(N), 0.0);
  for (int t = 0; t < N; ++t)
    for (int tau = 0; tau <= t; ++tau) y[static_cast<std::size_t>(t)] += g(t - tau) * u(tau);
  return Signal::from_values(std::move(y));
}

OvdVerification ovd_verify(const System& sys, OperatorKind kind, int k, int L, int N,
                           const OvdVerifyOptions& opt) {
  if (k < 1) throw std::invalid_argument("ovd_verify: k must be >= 1");
  if (opt.alphabet.empty()) throw std::invalid_argument("ovd_verify: empty alphabet");
  std::uint64_t lattice = 1;
  for (int i = 0; i < L; ++i) {
    lattice *= opt.alphabet.size();
    if (lattice > opt.budget) throw BudgetExceeded("ovd_verify: input lattice exceeds the enumeration budget");
  }
  const Signal g = impulse_response(sys, N + L + 1);
  const OperatorTruncation op = truncate_operator(g, kind, L, N);
  OvdVerification out;
  out.rank = numerical_rank(op.matrix);
  out.seed = opt.seed;

  auto check = [&](const Eigen::VectorXd& u, const char* source) {
    ++out.inputs_checked;
    const int su = variation(view(u), 0.0);
    if (su > k - 1) return;
    const Eigen::VectorXd y = clean_output(op.matrix, u, opt.zero_tol);
    const int sy = variation(view(y), 0.0);
    OvdCounterexample c{u, y, su, sy, sy > su, false, source};
    if (!c.variation_violation && sy == su) {
      const int a = first_nonzero_sign(view(u), 0.0), b = first_nonzero_sign(view(y), 0.0);
      c.order_violation = a != 0 && b != 0 && a != b;
    }
    if (!c.variation_violation && !c.order_violation) return;
    out.passed = false;
    out.variation_ok = out.variation_ok && !c.variation_violation;
    out.order_ok = out.order_ok && !c.order_violation;
    if (out.counterexamples.size() < opt.max_counterexamples) out.counterexamples.push_back(std::move(c));
  };

  for (const auto& m : opt.mandatory) {
    if (static_cast<int>(m.size()) > L) throw std::invalid_argument("ovd_verify: mandatory vector longer than L");
    Eigen::VectorXd u = Eigen::VectorXd::Zero(L);
    for (std::size_t i = 0; i < m.size(); ++i) u(static_cast<Eigen::Index>(i)) = m[i];
    check(u, "mandatory");
  }
  const std::uint64_t base = opt.alphabet.size();
  for (std::uint64_t idx = 0; idx < lattice; ++idx) {
    Eigen::VectorXd u(L);
    std::uint64_t rest = idx;
    for (int i = 0; i < L; ++i) {
      u(i) = opt.alphabet[rest % base];
      rest /= base;
    }
    check(u, "lattice");
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int s = 0; s < opt.samples; ++s) {
    Eigen::VectorXd u(L);
    for (int i = 0; i < L; ++i) u(i) = dist(rng);
    check(u, "random");
  }
  return out;
}

// ---- static nonlinearities -----------------------------------------------------------

namespace {

double table_value(const std::vector<std::pair<double, double>>& knots, double x) {
  if (x <= knots.front().first) return knots.front().second;
  if (x >= knots.back().first) return knots.back().second;
  auto hi = std::upper_bound(knots.begin(), knots.end(), x,
                             [](double v, const std::pair<double, double>& k) { return v < k.first; });
  auto lo = hi - 1;
  const double w = (x - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

void validate_table(std::vector<std::pair<double, double>>& knots, TableClaim claim) {
  if (knots.empty()) throw std::invalid_argument("apply_nonlinearity: empty table");
  std::sort(knots.begin(), knots.end());
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (knots[i].first == knots[i - 1].first) throw std::invalid_argument("apply_nonlinearity: duplicate knot");
  if (claim == TableClaim::Monotone) {
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (knots[i].second < knots[i - 1].second)
        throw std::invalid_argument("apply_nonlinearity: table declared monotone is decreasing");
  } else {
    bool neg = false, pos = false, origin = false;
    for (const auto& [x, y] : knots) {
      if (sign_of(x) != sign_of(y)) throw std::invalid_argument("apply_nonlinearity: table does not preserve signs");
      neg = neg || x < 0;
      pos = pos || x > 0;
      origin = origin || x == 0;
    }
    if (neg && pos && !origin)
      throw std::invalid_argument("apply_nonlinearity: sign-preserving table needs a knot at the origin");
  }
}

}  // namespace

Signal apply_nonlinearity(const Signal& y, const Nonlinearity& sigma) {
  std::vector<std::pair<double, double>> knots = sigma.table;
  bool sign_preserving = false, monotone = true, strict = false;
  switch (sigma.kind) {
    case NonlinearityKind::Relay: sign_preserving = true; break;
    case NonlinearityKind::Saturation:
      if (!(sigma.level > 0)) throw std::invalid_argument("apply_nonlinearity: saturation level must be positive");
      sign_preserving = true;
      break;
    case NonlinearityKind::ShiftedSigmoid: strict = true; break;
    case NonlinearityKind::Table:
      validate_table(knots, sigma.claim);
      sign_preserving = sigma.claim == TableClaim::SignPreserving;
      monotone = sigma.claim == TableClaim::Monotone;
      break;
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (double v : y.values()) {
    switch (sigma.kind) {
      case NonlinearityKind::Relay: out.push_back(sign_of(v)); break;
      case NonlinearityKind::Saturation: out.push_back(std::clamp(v, -sigma.level, sigma.level)); break;
      case NonlinearityKind::ShiftedSigmoid: out.push_back(1.0 / (1.0 + std::exp(-(v - sigma.shift)))); break;
      case NonlinearityKind::Table: out.push_back(table_value(knots, v)); break;
    }
  }
  Signal s(y.start(), std::move(out));
  if (sign_preserving && variation(s, 0.0) != variation(y, 0.0))
    throw std::logic_error("apply_nonlinearity: sign-preserving map changed the variation");
  if (monotone && y.size() >= 2) {
    const int before = variation(forward_difference(y, 1), 0.0);
    const int after = variation(forward_difference(s, 1), 0.0);
    if (after > before || (strict && after != before))
      throw std::logic_error("apply_nonlinearity: monotone map changed the extrema count");
  }
  return s;
}

// ---- worked examples ---------------------------------------------------------------------

PartialFractionSystem fig1_system() {
  return PartialFractionSystem({{0.9, 0.9}, {0.5, 0.5}, {-0.1, 0.1}});
}

namespace {

ScenarioResult make_scenario(std::string id, std::string description, OperatorKind kind, Signal input,
                             Signal output) {
  ScenarioResult s;
  s.id = std::move(id);
  s.description = std::move(description);
  s.kind = kind;
  s.input_variation = variation(input);
  s.output_variation = variation(output);
  if (kind == OperatorKind::Hankel) {
    // The leading input sample is u(-1), the latest one.
    std::vector<double> rev(input.values().rbegin(), input.values().rend());
    s.input_first_sign = first_nonzero_sign(rev);
  } else {
    s.input_first_sign = first_nonzero_sign(input);
  }
  s.output_first_sign = first_nonzero_sign(output);
  s.input = std::move(input);
  s.output = std::move(output);
  s.verdict = "S(u) = " + std::to_string(s.input_variation) + " -> S(y) = " + std::to_string(s.output_variation);
  if (s.output_variation < s.input_variation) s.verdict += ", variation diminished";
  else if (s.output_variation > s.input_variation) s.verdict += ", variation increased";
  else if (s.input_first_sign != s.output_first_sign) s.verdict += ", leading sign flipped";
  else s.verdict += ", variation and leading sign preserved";
  return s;
}

}  // namespace

std::vector<ScenarioResult> fig1_scenarios(int N) {
  const Signal g = impulse_response(fig1_system(), N + 8);
  std::vector<ScenarioResult> out;
  const std::vector<double> pa{1.0, -10.0};
  out.push_back(make_scenario("fig1a", "Hankel operator, past input (u(-1), u(-2)) = (1, -10)", OperatorKind::Hankel,
                              Signal(-2, {pa[1], pa[0]}), apply_hankel(g, pa, N)));
  const Signal ub(0, {10.0, -8.5});
  out.push_back(make_scenario("fig1b", "Toeplitz operator, input (u(0), u(1)) = (10, -8.5)", OperatorKind::Toeplitz,
                              ub, apply_toeplitz(g, ub, N)));
  const std::vector<double> pc{10.9, -21.5, 9.7};
  out.push_back(make_scenario("fig1c", "Hankel operator, past input (u(-1), u(-2), u(-3)) = (10.9, -21.5, 9.7)",
                              OperatorKind::Hankel, Signal(-3, {pc[2], pc[1], pc[0]}), apply_hankel(g, pc, N)));
  return out;
}

RationalTransferFunction heavy_ball_open_loop(double alpha, double beta) {
  if (!(alpha > 0) || !(beta > 0)) throw std::invalid_argument("heavy_ball: alpha and beta must be positive");
  return RationalTransferFunction::from_roots(alpha, {Complex(0.0, 0.0)}, {Complex(1.0, 0.0), Complex(beta, 0.0)});
}

namespace {

std::vector<Complex> quadratic_roots(double s, double q) {
  // z^2 - s z + q
  const double disc = s * s - 4.0 * q;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double big = 0.5 * (s + (s >= 0 ? root : -root));
    if (big == 0.0) return {Complex(0.0, 0.0), Complex(0.0, 0.0)};
    return {Complex(big, 0.0), Complex(q / big, 0.0)};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {Complex(0.5 * s, im), Complex(0.5 * s, -im)};
}

}  // namespace

RationalTransferFunction heavy_ball_closed_loop(double a, double alpha, double beta) {
  if (!(a > 0) || !(alpha > 0) || !(beta > 0)) throw std::invalid_argument("heavy_ball: a, alpha, beta must be positive");
  return RationalTransferFunction::from_roots(alpha, {Complex(0.0, 0.0)},
                                              quadratic_roots(1.0 + beta - a * alpha, beta));
}

HeavyBallResult heavy_ball(double a, double alpha, double beta, int steps) {
  const RationalTransferFunction open = heavy_ball_open_loop(alpha, beta);
  const RationalTransferFunction closed = heavy_ball_closed_loop(a, alpha, beta);
  HeavyBallResult r;
  r.a = a;
  r.alpha = alpha;
  r.beta = beta;
  r.threshold = std::pow(std::sqrt(a * alpha) + 1.0, 2);
  r.threshold_tp = beta >= r.threshold;
  const double s = 1.0 + beta - a * alpha;
  r.discriminant = s * s - 4.0 * beta;
  r.double_pole = std::abs(r.discriminant) <= 1e-12 * std::max(1.0, s * s);
  r.open_loop_num = open.numerator();
  r.open_loop_den = open.denominator();
  r.closed_loop_num = closed.numerator();
  r.closed_loop_den = closed.denominator();
  r.closed_loop_poles = closed.poles();
  r.closed_loop_report = check_toeplitz_total(closed);
  r.pole_test_tp = r.closed_loop_report.verdict == Verdict::Certified;
  r.simple_poles = repeated_pole_check(to_state_space(closed), 2).passed;

  // x(k+1) = x(k) - alpha (a x(k) - 1) + beta (x(k) - x(k-1)), x(0) = x(-1) = 0.
  std::vector<double> x{0.0};
  double prev = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double cur = x.back();
    x.push_back(cur - alpha * (a * cur - 1.0) + beta * (cur - prev));
    prev = cur;
  }
  std::vector<double> u(static_cast<std::size_t>(steps) + 1, 1.0);
  ScenarioResult sim = make_scenario("heavy_ball", "heavy-ball iterates for a unit step, x(0) = x(-1) = 0",
                                     OperatorKind::Toeplitz, Signal::from_values(u), Signal::from_values(x));
  const int extrema = variation(forward_difference(sim.output, 1));
  sim.verdict = "local extrema of the iterates: " + std::to_string(extrema) +
                (r.threshold_tp ? " (closed loop Toeplitz totally positive)" : " (below the threshold)");
  r.simulation = std::move(sim);
  return r;
}

NeuronalResult neuronal_condition(double r1, double r2, double r3, double p1, double p2, double p3) {
  if (!(r1 > 0 && r2 > 0 && r3 > 0)) throw std::invalid_argument("neuronal_condition: residues must be positive");
  if (!(r2 >= r3)) throw std::invalid_argument("neuronal_condition: needs r2 >= r3");
  if (!(p1 >= p2 && p2 > p3 && p3 > 0)) throw std::invalid_argument("neuronal_condition: needs p1 >= p2 > p3 > 0");
  NeuronalResult out;
  out.lhs = r1 * r2 * (p1 - p2) * (p1 - p2);
  out.rhs = r1 * r3 * (p1 - p3) * (p1 - p3) + r2 * r3 * (p2 - p3) * (p2 - p3);
  out.margin = out.lhs - out.rhs;
  out.holds = out.lhs >= out.rhs;
  return out;
}

std::string to_text(const ScenarioResult& s) {
  std::ostringstream os;
  auto join = [](std::span<const double> v) {
    std::string t;
    for (std::size_t i = 0; i < v.size(); ++i) t += (i ? ", " : "") + format_number(v[i]);
    return t;
  };
  os << "scenario {\n";
  os << "  id: " << s.id << "\n";
  os << "  description: " << s.description << "\n";
  os << "  operator: " << to_string(s.kind) << "\n";
  os << "  input_start: " << s.input.start() << "\n";
  os << "  input: [" << join(s.input.values()) << "]\n";
  os << "  output: [" << join(s.output.values()) << "]\n";
  os << "  input_variation: " << s.input_variation << "\n";
  os << "  output_variation: " << s.output_variation << "\n";
  os << "  input_first_sign: " << s.input_first_sign << "\n";
  os << "  output_first_sign: " << s.output_first_sign << "\n";
  os << "  seed: 0x" << std::hex << s.seed << std::dec << "\n";
  os << "  verdict: " << s.verdict << "\n";
  os << "}\n";
  return os.str();
}

std::string to_csv(const ScenarioResult& s) {
  std::string out = "t,u,y,dy\n";
  const std::int64_t first = std::min<std::int64_t>(s.input.start(), s.output.start());
  const std::int64_t last = std::max(s.input.end(), s.output.end()) - 1;
  for (std::int64_t t = first; t <= last; ++t) {
    out += std::to_string(t) + "," + format_number(s.input(t)) + ",";
    const bool has_y = t >= s.output.start() && t < s.output.end();
    if (has_y) out += format_number(s.output(t));
    out += ",";
    if (has_y && t + 1 < s.output.end()) out += format_number(s.output(t + 1) - s.output(t));
    out += "\n";
  }
  return out;
}

}  // namespace kpos
