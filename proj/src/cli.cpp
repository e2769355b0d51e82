#include "kpos/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "kpos/compound.hpp"
#include "kpos/error.hpp"
#include "kpos/format.hpp"
#include "kpos/oracle.hpp"
#include "kpos/system_io.hpp"

namespace kpos {

namespace {

struct Request {
  std::string system_path;
  std::string op = "external";
  int k = 1;
  bool total = false;
  int j = 2;
  int horizon = kDefaultHorizon;
  int L = 6;
  int N = 12;
  std::string alphabet = "-1,0,1";
  int samples = 0;
  std::string seed = "5EED";
  std::vector<std::string> vectors;
  std::string out_path;
  std::string format = "text";
  double a = 1.0, alpha = 1.0, beta = 4.0;
  int steps = 64;
  std::string scenario;
  std::string params = "0.9,0.5,0.1,0.9,0.5,0.1";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(std::string text, const std::string& what) {
  text.erase(std::remove_if(text.begin(), text.end(), [](char c) { return c == '{' || c == '}' || c == ' '; }),
             text.end());
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const char* first = item.data() + (item.size() && item[0] == '+' ? 1 : 0);
    const auto res = std::from_chars(first, item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size())
      throw UsageError("malformed number '" + item + "' in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

std::uint64_t parse_seed(std::string text) {
  if (text.rfind("0x", 0) == 0 || text.rfind("0X", 0) == 0) text = text.substr(2);
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw UsageError("seed must be hexadecimal");
  return v;
}

OperatorKind parse_operator(const std::string& op) {
  if (op == "hankel") return OperatorKind::Hankel;
  if (op == "toeplitz") return OperatorKind::Toeplitz;
  throw UsageError("operator must be hankel or toeplitz");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

std::string signal_csv(const Signal& g, const std::string& column, std::int64_t first, std::int64_t last) {
  std::string out = "t," + column + "\n";
  for (std::int64_t t = first; t <= last; ++t) out += std::to_string(t) + "," + format_number(g(t)) + "\n";
  return out;
}

std::string list_text(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s + "]";
}

void check_horizon(const Request& r, int k) {
  if (r.horizon < 2 * k) throw UsageError("horizon must be at least 2k");
}

int cmd_impulse(const Request& r, std::ostream& out) {
  const System sys = read_system_file(r.system_path);
  if (r.horizon < 1) throw UsageError("horizon must be positive");
  const std::string csv = signal_csv(impulse_response(sys, r.horizon), "g", 1, r.horizon);
  if (!r.out_path.empty()) write_file(r.out_path, csv);
  else out << csv;
  return kExitCertified;
}

int cmd_check(const Request& r, std::ostream& out) {
  const System sys = read_system_file(r.system_path);
  if (r.k < 1) throw UsageError("k must be >= 1");
  check_horizon(r, r.k);
  PositivityReport report;
  if (r.op == "external") {
    report = check_external(sys, r.horizon);
  } else if (parse_operator(r.op) == OperatorKind::Hankel) {
    report = r.total ? check_hankel_total(sys) : check_hankel_k(sys, r.k, r.horizon);
  } else {
    report = r.total ? check_toeplitz_total(sys) : check_toeplitz_k(sys, r.k, r.horizon);
  }
  const std::string text = to_text(report);
  out << text;
  if (!r.out_path.empty()) write_file(r.out_path, text);
  return exit_code(report.verdict);
}

int cmd_compound(const Request& r, std::ostream& out) {
  const System sys = read_system_file(r.system_path);
  if (r.j < 1) throw UsageError("j must be >= 1");
  if (r.horizon < 1) throw UsageError("horizon must be positive");
  const CompoundSystem cs = make_compound(sys, r.j);
  const Signal g = cs.impulse(r.horizon);
  const std::string csv = signal_csv(g, "g_" + std::to_string(r.j), 1, r.horizon);
  if (r.format == "csv") {
    out << csv;
  } else {
    std::ostringstream os;
    os << "compound {\n";
    os << "  j: " << r.j << "\n";
    os << "  source_order: " << cs.source_order << "\n";
    if (cs.vanishes()) {
      os << "  zero_system: true\n";
      os << "  note: compound order exceeds the system order; G_[" << r.j << "] vanishes identically\n";
    } else {
      os << "  state_dimension: " << cs.realization->order() << "\n";
      if (cs.pf_form) {
        os << "  poles: " << list_text(cs.pf_form->poles()) << "\n";
        os << "  residues: " << list_text(cs.pf_form->residues()) << "\n";
      }
      std::vector<double> head;
      for (int t = 1; t <= std::min(8, r.horizon); ++t) head.push_back(g(t));
      os << "  samples: " << list_text(head) << "\n";
    }
    if (r.j == 1) os << "  system {\n" << write_system(sys) << "  }\n";
    os << "}\n";
    out << os.str();
  }
  if (!r.out_path.empty()) write_file(r.out_path, csv);
  return kExitCertified;
}

int cmd_decompose(const Request& r, std::ostream& out, std::ostream& err) {
  const System sys = read_system_file(r.system_path);
  if (r.k < 1) throw UsageError("k must be >= 1");
  const OperatorKind kind = parse_operator(r.op);
  const PositivityReport pre =
      kind == OperatorKind::Hankel ? check_hankel_k(sys, r.k, r.horizon) : check_toeplitz_k(sys, r.k, r.horizon);
  if (pre.verdict == Verdict::Refuted) {
    out << to_text(pre);
    err << "decompose: precondition refuted\n";
    return kExitRefuted;
  }
  Decomposition d;
  std::string dominant_text, remainder_text;
  if (kind == OperatorKind::Hankel) {
    const auto pfs = try_partial_fractions(sys);
    if (!pfs) {
      err << "decompose: Hankel decomposition needs simple real poles\n";
      return kExitUnsupported;
    }
    d = hankel_decompose(*pfs, r.k, r.horizon);
    dominant_text = write_system(d.dominant);
  } else {
    d = toeplitz_decompose(to_rational(sys), r.k, r.horizon);
    dominant_text = "# factor z/(z - p1) with p1 = " + format_exact(d.factor_pole) + "\n";
  }
  remainder_text = d.remainder ? write_system(*d.remainder) : std::string("# zero remainder\n");
  out << "# mode: " << (kind == OperatorKind::Hankel ? "hankel_additive" : "toeplitz_multiplicative") << "\n";
  out << "# k: " << r.k << "\n";
  for (const auto& n : d.notes) out << "# note: " << n << "\n";
  out << "# dominant\n" << dominant_text << "# remainder\n" << remainder_text;
  if (!r.out_path.empty()) {
    write_file(r.out_path + ".dominant.sys", dominant_text);
    write_file(r.out_path + ".remainder.sys", remainder_text);
  }
  return exit_code(pre.verdict);
}

std::string counterexample_csv(const OvdCounterexample& c, OperatorKind kind, std::size_t index) {
  std::string out = "# counterexample " + std::to_string(index) + " (" + c.source + ")\n";
  ScenarioResult s;
  s.kind = kind;
  std::vector<double> u(c.input.data(), c.input.data() + c.input.size());
  if (kind == OperatorKind::Hankel) {
    std::reverse(u.begin(), u.end());
    s.input = Signal(-static_cast<std::int64_t>(u.size()), u);
  } else {
    s.input = Signal(0, u);
  }
  s.output = Signal(0, std::vector<double>(c.output.data(), c.output.data() + c.output.size()));
  return out + to_csv(s);
}

int cmd_oracle(const Request& r, std::ostream& out) {
  const System sys = read_system_file(r.system_path);
  if (r.k < 1) throw UsageError("k must be >= 1");
  const OperatorKind kind = parse_operator(r.op);
  OvdVerifyOptions opt;
  opt.alphabet = parse_list(r.alphabet, "alphabet");
  opt.samples = r.samples;
  opt.seed = parse_seed(r.seed);
  for (const auto& v : r.vectors) opt.mandatory.push_back(parse_list(v, "vector"));
  const OvdVerification res = ovd_verify(sys, kind, r.k, r.L, r.N, opt);
  std::ostringstream os;
  os << "oracle {\n";
  os << "  operator: " << to_string(kind) << "\n";
  os << "  k: " << r.k << "\n";
  os << "  input_length: " << r.L << "\n";
  os << "  output_length: " << r.N << "\n";
  os << "  rank: " << res.rank << "\n";
  os << "  inputs_checked: " << res.inputs_checked << "\n";
  os << "  seed: 0x" << std::hex << std::uppercase << res.seed << std::dec << std::nouppercase << "\n";
  os << "  passed: " << (res.passed ? "true" : "false") << "\n";
  os << "  variation_clause: " << (res.variation_ok ? "holds" : "violated") << "\n";
  os << "  order_clause: " << (res.order_ok ? "holds" : "violated") << "\n";
  std::string csv;
  for (std::size_t i = 0; i < res.counterexamples.size(); ++i) {
    const auto& c = res.counterexamples[i];
    os << "  counterexample {\n";
    os << "    source: " << c.source << "\n";
    os << "    input: " << list_text(std::vector<double>(c.input.data(), c.input.data() + c.input.size())) << "\n";
    os << "    output: " << list_text(std::vector<double>(c.output.data(), c.output.data() + c.output.size()))
       << "\n";
    os << "    input_variation: " << c.input_variation << "\n";
    os << "    output_variation: " << c.output_variation << "\n";
    os << "    violation: " << (c.variation_violation ? "variation" : "order") << "\n";
    os << "  }\n";
    csv += counterexample_csv(c, kind, i + 1);
  }
  os << "}\n";
  if (r.format == "csv") out << csv;
  else out << os.str();
  if (!r.out_path.empty()) write_file(r.out_path, csv);
  return res.passed ? kExitCertified : kExitRefuted;
}

int cmd_heavyball(const Request& r, std::ostream& out) {
  if (!(r.a > 0) || !(r.alpha > 0) || !(r.beta > 0)) throw UsageError("a, alpha and beta must be positive");
  const HeavyBallResult hb = heavy_ball(r.a, r.alpha, r.beta, r.steps);
  std::ostringstream os;
  os << "heavy_ball {\n";
  os << "  a: " << format_number(hb.a) << "\n";
  os << "  alpha: " << format_number(hb.alpha) << "\n";
  os << "  beta: " << format_number(hb.beta) << "\n";
  os << "  threshold: " << format_number(hb.threshold) << "\n";
  os << "  threshold_classification: " << (hb.threshold_tp ? "toeplitz_total" : "not_toeplitz_total") << "\n";
  os << "  closed_loop_num: " << list_text(hb.closed_loop_num) << "\n";
  os << "  closed_loop_den: " << list_text(hb.closed_loop_den) << "\n";
  os << "  discriminant: " << format_number(hb.discriminant) << "\n";
  os << "  double_pole: " << (hb.double_pole ? "true" : "false") << "\n";
  os << "  simple_poles: " << (hb.simple_poles ? "true" : "false") << "\n";
  os << "  pole_zero_classification: " << (hb.pole_test_tp ? "toeplitz_total" : "not_toeplitz_total") << "\n";
  os << "  simulation: " << hb.simulation.verdict << "\n";
  os << "}\n";
  os << to_text(hb.closed_loop_report);
  const std::string csv = to_csv(hb.simulation);
  if (r.format == "csv") out << csv;
  else out << os.str();
  if (!r.out_path.empty()) write_file(r.out_path, csv);
  return exit_code(hb.closed_loop_report.verdict);
}

int cmd_scenario(const Request& r, std::ostream& out) {
  std::string text, csv;
  int code = kExitCertified;
  if (r.scenario == "fig1") {
    for (const auto& s : fig1_scenarios(r.horizon < 8 ? 8 : std::min(r.horizon, 8))) {
      text += to_text(s);
      csv += "# " + s.id + ": " + s.description + "\n" + to_csv(s);
    }
  } else if (r.scenario == "neuronal") {
    const auto p = parse_list(r.params, "params");
    if (p.size() != 6) throw UsageError("params needs r1,r2,r3,p1,p2,p3");
    const NeuronalResult nc = neuronal_condition(p[0], p[1], p[2], p[3], p[4], p[5]);
    const PartialFractionSystem g({{p[0], p[3]}, {p[1], p[4]}, {-p[2], p[5]}});
    const PositivityReport rep = check_hankel_k(g, 2, r.horizon);
    std::ostringstream os;
    os << "neuronal {\n";
    os << "  lhs: " << format_number(nc.lhs) << "\n";
    os << "  rhs: " << format_number(nc.rhs) << "\n";
    os << "  margin: " << format_number(nc.margin) << "\n";
    os << "  holds: " << (nc.holds ? "true" : "false") << "\n";
    os << "  g2_at_1: " << format_number(compound_impulse(impulse_response(g, 4), 2, 1)(1)) << "\n";
    os << "}\n";
    text = os.str() + to_text(rep);
    csv = signal_csv(impulse_response(g, r.horizon), "g", 1, r.horizon);
    code = exit_code(rep.verdict);
  } else {
    throw UsageError("unknown scenario '" + r.scenario + "' (expected fig1 or neuronal)");
  }
  if (r.format == "csv") out << csv;
  else out << text;
  if (!r.out_path.empty()) write_file(r.out_path, csv);
  return code;
}

}  // namespace

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Certified: return kExitCertified;
    case Verdict::HoldsToHorizon: return kExitHolds;
    case Verdict::Refuted: return kExitRefuted;
    case Verdict::Unsupported: return kExitUnsupported;
  }
  return kExitFailure;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"k-positivity analysis of discrete-time LTI systems", "kpos"};
  app.require_subcommand(1);
  Request r;

  auto add_system = [&](CLI::App* c) { c->add_option("--system", r.system_path, "System definition file")->required(); };
  auto add_horizon = [&](CLI::App* c) { c->add_option("--horizon", r.horizon, "Number of samples")->capture_default_str(); };
  auto add_output = [&](CLI::App* c) {
    c->add_option("--out", r.out_path, "Write CSV / report to this path");
    c->add_option("--format", r.format, "Standard output format")->check(CLI::IsMember({"text", "csv"}));
  };

  auto* impulse = app.add_subcommand("impulse", "Impulse response as CSV");
  add_system(impulse);
  add_horizon(impulse);
  add_output(impulse);

  auto* check = app.add_subcommand("check", "Positivity verdict with exit code");
  add_system(check);
  add_horizon(check);
  add_output(check);
  check->add_option("--operator", r.op, "Operator (default external)")->check(CLI::IsMember({"hankel", "toeplitz", "external"}));
  check->add_option("--k", r.k, "Order k (default 1)");
  check->add_flag("--total", r.total, "Total positivity instead of k-positivity");

  auto* compound = app.add_subcommand("compound", "Compound system G_[j]");
  add_system(compound);
  add_horizon(compound);
  add_output(compound);
  compound->add_option("--j", r.j, "Compound order")->required();

  auto* decompose = app.add_subcommand("decompose", "Dominant / remainder split");
  add_system(decompose);
  add_horizon(decompose);
  add_output(decompose);
  decompose->add_option("--operator", r.op, "Operator")->required()->check(CLI::IsMember({"hankel", "toeplitz"}));
  decompose->add_option("--k", r.k, "Order k")->required();

  auto* oracle = app.add_subcommand("oracle", "Brute-force variation check on truncated operators");
  add_system(oracle);
  add_output(oracle);
  oracle->add_option("--operator", r.op, "Operator")->required()->check(CLI::IsMember({"hankel", "toeplitz"}));
  oracle->add_option("--k", r.k, "Order k")->required();
  oracle->add_option("--L", r.L, "Input length")->capture_default_str();
  oracle->add_option("--N", r.N, "Output length")->capture_default_str();
  oracle->add_option("--alphabet", r.alphabet, "Comma separated input values")->capture_default_str();
  oracle->add_option("--samples", r.samples, "Random real inputs")->capture_default_str();
  oracle->add_option("--seed", r.seed, "Hexadecimal seed")->capture_default_str();
  oracle->add_option("--vector", r.vectors, "Mandatory input vector (repeatable)");

  auto* heavyball = app.add_subcommand("heavyball", "Heavy-ball closed loop classification");
  add_output(heavyball);
  heavyball->add_option("--a", r.a)->capture_default_str();
  heavyball->add_option("--alpha", r.alpha)->capture_default_str();
  heavyball->add_option("--beta", r.beta)->capture_default_str();
  heavyball->add_option("--steps", r.steps)->capture_default_str();

  auto* scenario = app.add_subcommand("scenario", "Worked examples");
  add_horizon(scenario);
  add_output(scenario);
  scenario->add_option("name", r.scenario, "fig1 or neuronal")->required();
  scenario->add_option("--params", r.params, "r1,r2,r3,p1,p2,p3 for the neuronal condition")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*impulse) return cmd_impulse(r, out);
    if (*check) return cmd_check(r, out);
    if (*compound) return cmd_compound(r, out);
    if (*decompose) return cmd_decompose(r, out, err);
    if (*oracle) return cmd_oracle(r, out);
    if (*heavyball) return cmd_heavyball(r, out);
    if (*scenario) return cmd_scenario(r, out);
  } catch (const ParseError& e) {
    err << "error: " << r.system_path << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const UnsupportedRepresentation& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace kpos
