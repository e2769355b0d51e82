#include "kpos/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kpos/compound.hpp"
#include "kpos/error.hpp"
#include "kpos/format.hpp"

namespace kpos {

namespace {

constexpr double kSampleTol = 1e-10;
constexpr double kDominanceMargin = 1e-9;
constexpr std::int64_t kTailCap = 100000;

std::string fmt(double v) { return format_number(v); }

std::string fmt(const Complex& z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

System scaled_system(const System& sys, double factor) {
  if (const auto* pfs = std::get_if<PartialFractionSystem>(&sys)) return pfs->scaled(factor);
  if (const auto* rtf = std::get_if<RationalTransferFunction>(&sys))
    return RationalTransferFunction::from_roots(rtf->gain() * factor, rtf->zeros(), rtf->poles());
  const auto& ss = std::get<StateSpace>(sys);
  return StateSpace(ss.A(), ss.b(), factor * ss.c());
}

// Reference magnitude sum_i |r_i| |p_i|^(t-1) + |d_t| for t = 0..horizon.
std::vector<double> modal_magnitude(const ModalForm& form, int horizon) {
  std::vector<double> mag(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (std::size_t i = 0; i < form.poles.size(); ++i) {
    const double r = std::abs(form.residues[i]), p = std::abs(form.poles[i]);
    double power = 1.0;
    for (int t = 1; t <= horizon; ++t) {
      mag[static_cast<std::size_t>(t)] += r * power;
      power *= p;
    }
  }
  for (std::size_t l = 0; l < form.fir.size() && l + 1 <= static_cast<std::size_t>(horizon); ++l)
    mag[l + 1] += std::abs(form.fir[l]);
  return mag;
}

std::optional<std::int64_t> first_nonzero_time(const Signal& g, const std::vector<double>& mag) {
  for (std::int64_t t = 1; t < g.end(); ++t) {
    const double scale = static_cast<std::size_t>(t) < mag.size() ? mag[static_cast<std::size_t>(t)] : 0.0;
    if (std::abs(g(t)) > 1e-12 * scale && g(t) != 0.0) return t;
  }
  return std::nullopt;
}

// First t in [1, last] with g(t) < -tol * mag(t).
std::optional<std::int64_t> negative_sample(const Signal& g, const std::vector<double>& mag, std::int64_t last) {
  for (std::int64_t t = 1; t <= last; ++t)
    if (g(t) < -kSampleTol * mag[static_cast<std::size_t>(t)]) return t;
  return std::nullopt;
}

PositivityReport refuted(PositivityReport r, Witness w) {
  r.verdict = Verdict::Refuted;
  r.witness = std::move(w);
  r.certificate.reset();
  return r;
}

Witness sample_witness(const Signal& g, std::int64_t t) {
  Witness w;
  w.kind = "sample";
  w.time = t;
  w.value = g(t);
  w.detail = "g(" + std::to_string(t) + ") = " + fmt(g(t)) + " < 0";
  return w;
}

Witness lift_witness(const PositivityReport& inner, const std::string& kind, int j) {
  Witness w = inner.witness.value_or(Witness{});
  w.detail = kind + " G_[" + std::to_string(j) + "]: " + w.detail;
  w.kind = kind;
  w.index = j;
  return w;
}

std::vector<Complex> significant_poles(const System& sys) {
  if (auto form = modal_form(sys)) {
    std::vector<Complex> out = form->poles;
    for (std::size_t l = 0; l < form->fir.size(); ++l) out.emplace_back(0.0, 0.0);
    sort_pole_order(out);
    return out;
  }
  return poles(sys);
}

PositivityReport wrap(Property property, int k, int horizon, PositivityReport inner, std::string note) {
  PositivityReport r;
  r.property = property;
  r.k = k;
  r.horizon = horizon;
  r.verdict = inner.verdict;
  r.t0 = inner.t0;
  r.certificate = inner.certificate;
  r.witness = inner.witness;
  r.notes.push_back(std::move(note));
  r.parts.push_back(std::move(inner));
  return r;
}

}  // namespace

Verdict merge(Verdict a, Verdict b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

const char* to_string(Property p) {
  switch (p) {
    case Property::External: return "external";
    case Property::HankelK: return "hankel_k";
    case Property::ToeplitzK: return "toeplitz_k";
    case Property::HankelTotal: return "hankel_total";
    case Property::ToeplitzTotal: return "toeplitz_total";
    case Property::Relaxation: return "relaxation";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::HoldsToHorizon: return "holds_to_horizon";
    case Verdict::Unsupported: return "unsupported";
    case Verdict::Refuted: return "refuted";
  }
  return "?";
}

const char* to_string(OperatorKind kind) { return kind == OperatorKind::Hankel ? "hankel" : "toeplitz"; }

// ---- external positivity ------------------------------------------------------

PositivityReport check_external(const System& sys, int horizon) {
  if (horizon < 1) throw std::invalid_argument("check_external: horizon must be >= 1");
  PositivityReport report;
  report.property = Property::External;
  report.k = 1;
  report.horizon = horizon;

  const auto form = modal_form(sys);
  if (const auto* pfs = std::get_if<PartialFractionSystem>(&sys); pfs && pfs->is_zero()) {
    report.verdict = Verdict::Certified;
    report.certificate = Certificate{"zero_system", "g vanishes identically", std::nullopt};
    return report;
  }

  Signal g = impulse_response(sys, horizon);
  std::vector<double> mag;
  if (form) {
    mag = modal_magnitude(*form, horizon);
  } else {
    double peak = 0.0;
    for (double v : g.values()) peak = std::max(peak, std::abs(v));
    mag.assign(static_cast<std::size_t>(horizon) + 1, peak);
  }
  report.t0 = first_nonzero_time(g, mag);
  if (auto t = negative_sample(g, mag, horizon)) return refuted(report, sample_witness(g, *t));

  const std::vector<Complex> all_poles = significant_poles(sys);
  const bool nilpotent =
      std::all_of(all_poles.begin(), all_poles.end(), [](const Complex& p) { return std::abs(p) == 0.0; });
  if (nilpotent) {
    const int support = std::max(1, system_order(sys));
    if (support > horizon) {
      g = impulse_response(sys, support);
      if (form) mag = modal_magnitude(*form, support);
      else mag.resize(static_cast<std::size_t>(support) + 1, mag.back());
      if (auto t = negative_sample(g, mag, support)) return refuted(report, sample_witness(g, *t));
    }
    report.verdict = Verdict::Certified;
    report.certificate = Certificate{"finite_impulse",
                                     "all poles at the origin; every nonzero sample up to t = " +
                                         std::to_string(support) + " checked",
                                     static_cast<std::int64_t>(support) + 1};
    return report;
  }
  if (!form) {
    report.verdict = Verdict::HoldsToHorizon;
    report.notes.push_back("repeated poles: no modal tail certificate; samples nonnegative up to the horizon");
    return report;
  }
  if (form->poles.empty()) {
    report.verdict = Verdict::Certified;
    report.certificate = Certificate{"zero_system", "all modes have negligible residue", std::nullopt};
    return report;
  }

  const Complex p1 = form->poles.front();
  const Complex r1 = form->residues.front();
  if (!is_real(p1)) {
    Witness w{"pole", "dominant pole " + fmt(p1) + " is not real", std::abs(p1), std::nullopt, 1, p1, std::nullopt};
    return refuted(report, w);
  }
  if (p1.real() < 0.0) {
    Witness w{"pole", "dominant pole " + fmt(p1) + " is negative", p1.real(), std::nullopt, 1, p1, std::nullopt};
    return refuted(report, w);
  }
  if (r1.real() <= 0.0) {
    Witness w{"residue", "dominant residue " + fmt(r1.real()) + " is not positive", r1.real(), std::nullopt, 1,
              p1, std::nullopt};
    return refuted(report, w);
  }
  try {
    const RationalTransferFunction rtf = to_rational(sys);
    for (const Complex& z : rtf.zeros()) {
      if (!is_real(z) || z.real() < p1.real()) continue;
      if (std::abs(z.real() - p1.real()) <= 1e-9 * (1.0 + std::abs(p1))) continue;
      Witness w{"zero", "real zero " + fmt(z) + " lies at or beyond the dominant pole " + fmt(p1), z.real(),
                std::nullopt, std::nullopt, z, std::nullopt};
      return refuted(report, w);
    }
  } catch (const std::exception& e) {
    report.notes.push_back(std::string("zero test skipped: ") + e.what());
  }

  const double a1 = std::abs(p1);
  for (std::size_t i = 1; i < form->poles.size(); ++i) {
    if (std::abs(form->poles[i]) >= a1 * (1.0 - kDominanceMargin)) {
      report.verdict = Verdict::HoldsToHorizon;
      report.notes.push_back("dominant pole magnitude is shared by pole " + fmt(form->poles[i]) +
                             "; no tail certificate");
      return report;
    }
  }

  const std::int64_t start = static_cast<std::int64_t>(form->fir.size()) + 1;
  std::vector<double> weight, ratio;
  for (std::size_t i = 1; i < form->poles.size(); ++i) {
    ratio.push_back(std::abs(form->poles[i]) / a1);
    weight.push_back(std::abs(form->residues[i]) * std::pow(ratio.back(), static_cast<double>(start - 1)));
  }
  std::optional<std::int64_t> tail_start;
  for (std::int64_t T = start; T <= kTailCap; ++T) {
    double tail = 0.0;
    for (double w : weight) tail += w;
    if (tail < r1.real() * (1.0 - 1e-12)) {
      tail_start = T;
      break;
    }
    for (std::size_t i = 0; i < weight.size(); ++i) weight[i] *= ratio[i];
  }
  if (!tail_start) {
    report.verdict = Verdict::HoldsToHorizon;
    report.notes.push_back("tail-dominance bound not reached before t = " + std::to_string(kTailCap));
    return report;
  }
  if (*tail_start - 1 > horizon) {
    const int extended = static_cast<int>(*tail_start - 1);
    g = impulse_response(sys, extended);
    mag = modal_magnitude(*form, extended);
    if (auto t = negative_sample(g, mag, extended)) return refuted(report, sample_witness(g, *t));
    report.notes.push_back("samples extended to t = " + std::to_string(extended) + " to meet the tail bound");
  }
  report.verdict = Verdict::Certified;
  report.certificate = Certificate{
      "tail_dominance",
      "r1 p1^(t-1) > sum_{i>=2} |r_i||p_i|^(t-1) for t >= " + std::to_string(*tail_start) + " with r1 = " +
          fmt(r1.real()) + ", p1 = " + fmt(p1.real()) + "; samples before it are nonnegative",
      tail_start};
  return report;
}

// ---- Hankel / Toeplitz k-positivity -----------------------------------------------

PositivityReport check_hankel_k(const System& sys, int k, int horizon) {
  if (k < 1) throw std::invalid_argument("check_hankel_k: k must be >= 1");
  const int n = system_order(sys);
  if (k > n)
    return wrap(Property::HankelK, k, horizon, check_hankel_total(sys),
                "k = " + std::to_string(k) + " exceeds the order " + std::to_string(n) +
                    "; Hankel k-positivity reduces to Hankel total positivity");
  if (k == 1)
    return wrap(Property::HankelK, 1, horizon, check_external(sys, horizon),
                "Hankel 1-positivity is external positivity");

  PositivityReport report;
  report.property = Property::HankelK;
  report.k = k;
  report.horizon = horizon;
  const Signal g = impulse_response(sys, 2 * k);
  report.t0 = first_nonzero_time(g, std::vector<double>(g.size(), 0.0));

  const Eigen::MatrixXd H1 = hankel_matrix(g, 1, k - 1).entries;
  for (int j = 1; j <= k - 1; ++j) {
    const Eigen::MatrixXd lead = H1.topLeftCorner(j, j);
    IndexTuple I{k - 1, {}};
    for (int i = 1; i <= j; ++i) I.elements.push_back(i);
    const double v = minor(H1, I, I);
    if (!(v > kMinorTol * minor_scale(H1, I, I))) {
      Witness w{"hankel_minor",
                "leading " + std::to_string(j) + "-minor of H_g(1," + std::to_string(k - 1) + ") = " + fmt(v) +
                    " is not positive",
                v, 1, j, std::nullopt, MinorReport{j, I, I, v}};
      return refuted(report, w);
    }
  }
  report.notes.push_back("H_g(1," + std::to_string(k - 1) + ") positive definite");

  const Eigen::MatrixXd H2 = hankel_matrix(g, 2, k - 1).entries;
  if (!is_psd(H2)) {
    Witness w;
    w.kind = "psd";
    w.time = 2;
    if (auto m = psd_violation(H2)) {
      w.minor = *m;
      w.value = m->value;
      w.detail = "principal " + std::to_string(m->order) + "-minor of H_g(2," + std::to_string(k - 1) +
                 ") = " + fmt(m->value) + " is negative";
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H2, Eigen::EigenvaluesOnly);
      w.value = es.eigenvalues().minCoeff();
      w.detail = "H_g(2," + std::to_string(k - 1) + ") has eigenvalue " + fmt(w.value);
    }
    return refuted(report, w);
  }
  report.notes.push_back("H_g(2," + std::to_string(k - 1) + ") positive semidefinite");

  const CompoundSystem cs = make_compound(sys, k);
  const System csys = cs.pf_form ? System(*cs.pf_form) : System(*cs.realization);
  PositivityReport inner = check_external(csys, horizon);
  inner.label = "G_[" + std::to_string(k) + "]";
  report.verdict = inner.verdict;
  if (inner.verdict == Verdict::Refuted) {
    report.witness = lift_witness(inner, "compound", k);
  } else if (inner.verdict == Verdict::Certified) {
    report.certificate = Certificate{"compound_chain",
                                     "H_g(1,k-1) > 0, H_g(2,k-1) >= 0 and G_[" + std::to_string(k) +
                                         "] certified by " + inner.certificate->kind,
                                     inner.certificate->tail_start};
  }
  report.parts.push_back(std::move(inner));
  return report;
}

PositivityReport check_toeplitz_k(const System& sys, int k, int horizon) {
  if (k < 1) throw std::invalid_argument("check_toeplitz_k: k must be >= 1");
  PositivityReport report;
  report.property = Property::ToeplitzK;
  report.k = k;
  report.horizon = horizon;

  if (k >= 2) {
    const std::vector<Complex> p = significant_poles(sys);
    if (static_cast<int>(p.size()) < k - 1 || std::abs(p[static_cast<std::size_t>(k - 2)]) == 0.0) {
      report.verdict = Verdict::Unsupported;
      Witness w;
      w.kind = "hypothesis";
      w.index = k - 1;
      w.detail = "pole p_" + std::to_string(k - 1) + " is zero or absent; the minor criterion needs it nonzero";
      report.witness = w;
      return report;
    }
  }

  const Signal g = impulse_response(sys, horizon + 2 * k);
  report.t0 = first_nonzero_time(g, std::vector<double>(g.size(), 0.0));
  Verdict verdict = Verdict::Certified;
  for (int j = 1; j <= k; ++j) {
    const CompoundSystem cs = make_compound(sys, j);
    PositivityReport inner;
    if (cs.vanishes()) {
      inner.property = Property::External;
      inner.horizon = horizon;
      inner.verdict = Verdict::Certified;
      inner.certificate = Certificate{"zero_system", "compound order exceeds the system order", std::nullopt};
    } else {
      const System csys = cs.pf_form ? System(*cs.pf_form) : System(*cs.realization);
      inner = check_external(scaled_system(csys, xi(j)), horizon);
    }
    inner.label = (xi(j) > 0 ? "G_[" : "-G_[") + std::to_string(j) + "]";
    verdict = merge(verdict, inner.verdict);
    const bool bad = inner.verdict == Verdict::Refuted;
    if (bad) report.witness = lift_witness(inner, "compound", j);
    report.parts.push_back(std::move(inner));
    if (bad) {
      report.verdict = Verdict::Refuted;
      return report;
    }
  }

  if (report.t0) {
    for (int j = 2; j <= k - 1; ++j)
      for (std::int64_t t = *report.t0; t <= j - 1; ++t) {
        const Eigen::MatrixXd T = toeplitz_matrix(g, t, j).entries;
        const double v = toeplitz_minor(g, t, j);
        double scale = 1.0;
        for (Eigen::Index i = 0; i < T.rows(); ++i) scale *= T.row(i).cwiseAbs().maxCoeff();
        if (!(v > kMinorTol * scale)) {
          IndexTuple I{j, {}};
          for (int i = 1; i <= j; ++i) I.elements.push_back(i);
          Witness w{"toeplitz_minor",
                    "det T_g(" + std::to_string(t) + "," + std::to_string(j) + ") = " + fmt(v) + " is not positive",
                    v, t, j, std::nullopt, MinorReport{j, I, I, v}};
          return refuted(report, w);
        }
      }
    if (k >= 3) report.notes.push_back("initial Toeplitz minors det T_g(t,j), t0 <= t < j < k, positive");
  }
  report.verdict = verdict;
  if (verdict == Verdict::Certified)
    report.certificate = Certificate{"compound_chain",
                                     "xi(j) G_[j] certified externally positive for j = 1.." + std::to_string(k),
                                     std::nullopt};
  return report;
}

PositivityReport check_hankel_total(const System& sys) {
  PositivityReport report;
  report.property = Property::HankelTotal;
  report.k = system_order(sys);
  const auto form = modal_form(sys);
  if (!form) {
    Witness w;
    w.kind = "repeated_pole";
    w.detail = "repeated pole: a Hankel totally positive system has simple poles";
    return refuted(report, w);
  }
  std::vector<Complex> res = form->residues, pol = form->poles;
  if (form->fir.size() >= 2) {
    Witness w;
    w.kind = "repeated_pole";
    w.location = Complex(0.0, 0.0);
    w.detail = "FIR tail of length " + std::to_string(form->fir.size()) + " is a repeated pole at the origin";
    return refuted(report, w);
  }
  if (form->fir.size() == 1) {
    auto it = std::find_if(pol.begin(), pol.end(), [](const Complex& p) { return std::abs(p) == 0.0; });
    if (it == pol.end()) {
      res.emplace_back(form->fir[0], 0.0);
      pol.emplace_back(0.0, 0.0);
    } else {
      res[static_cast<std::size_t>(it - pol.begin())] += form->fir[0];
    }
  }
  double total = 0.0;
  for (const auto& r : res) total += std::abs(r);
  for (std::size_t i = 0; i < pol.size(); ++i) {
    const int idx = static_cast<int>(i) + 1;
    if (!is_real(pol[i])) {
      Witness w{"pole", "pole " + fmt(pol[i]) + " is not real", std::abs(pol[i]), std::nullopt, idx, pol[i],
                std::nullopt};
      return refuted(report, w);
    }
    if (pol[i].real() < -1e-12) {
      Witness w{"pole", "pole " + fmt(pol[i]) + " is negative", pol[i].real(), std::nullopt, idx, pol[i],
                std::nullopt};
      return refuted(report, w);
    }
    if (res[i].real() < -1e-12 * total) {
      Witness w{"residue", "residue " + fmt(res[i].real()) + " at pole " + fmt(pol[i]) + " is negative",
                res[i].real(), std::nullopt, idx, pol[i], std::nullopt};
      return refuted(report, w);
    }
  }
  report.verdict = Verdict::Certified;
  report.certificate =
      Certificate{"sign_pattern", "parallel interconnection of first-order lags with r_i >= 0, p_i >= 0",
                  std::nullopt};
  return report;
}

PositivityReport check_toeplitz_total(const System& sys) {
  PositivityReport report;
  report.property = Property::ToeplitzTotal;
  report.k = system_order(sys);
  std::optional<RationalTransferFunction> rtf;
  try {
    rtf = to_rational(sys);
  } catch (const StructuralError& e) {
    report.verdict = Verdict::Unsupported;
    report.notes.push_back(std::string("no minimal rational form: ") + e.what());
    return report;
  }
  if (!(rtf->gain() > 0.0)) {
    Witness w{"gain", "gain " + fmt(rtf->gain()) + " is not positive", rtf->gain(), std::nullopt, std::nullopt,
              std::nullopt, std::nullopt};
    return refuted(report, w);
  }
  int idx = 0;
  for (const Complex& p : rtf->poles()) {
    ++idx;
    if (!is_real(p) || p.real() < -1e-12) {
      Witness w{"pole", "pole " + fmt(p) + " is not real and nonnegative", p.real(), std::nullopt, idx, p,
                std::nullopt};
      return refuted(report, w);
    }
  }
  idx = 0;
  for (const Complex& z : rtf->zeros()) {
    ++idx;
    if (!is_real(z) || z.real() > 1e-10) {
      Witness w{"zero", "zero " + fmt(z) + " is not real and nonpositive", z.real(), std::nullopt, idx, z,
                std::nullopt};
      return refuted(report, w);
    }
  }
  report.verdict = Verdict::Certified;
  report.certificate = Certificate{
      "sign_pattern", "series interconnection of first-order lags: gain > 0, poles >= 0, zeros <= 0", std::nullopt};
  return report;
}

CoefficientCheck necessary_coefficients(const PartialFractionSystem& pfs, int k, OperatorKind kind) {
  if (k < 1) throw std::invalid_argument("necessary_coefficients: k must be >= 1");
  CoefficientCheck out;
  const auto& terms = pfs.terms();
  const int m = std::min<int>(k, static_cast<int>(terms.size()));
  for (int i = 1; i <= m; ++i) {
    const auto& t = terms[static_cast<std::size_t>(i - 1)];
    const double sign = (kind == OperatorKind::Toeplitz && i % 2 == 0) ? -1.0 : 1.0;
    if (!(sign * t.residue > 0.0)) {
      out.passed = false;
      out.offending_index = i;
      out.reason = "residue r_" + std::to_string(i) + " = " + fmt(t.residue) + " has the wrong sign";
      return out;
    }
    if (t.pole < 0.0) {
      out.passed = false;
      out.offending_index = i;
      out.reason = "pole p_" + std::to_string(i) + " = " + fmt(t.pole) + " is negative";
      return out;
    }
  }
  return out;
}

RelaxationResult check_relaxation(const PartialFractionSystem& pfs, int J, int horizon) {
  if (J < 0 || horizon < 2) throw std::invalid_argument("check_relaxation: need J >= 0 and horizon >= 2");
  RelaxationResult out;
  out.nonnegative_coefficients = pfs.fir().empty();
  for (const auto& t : pfs.terms())
    if (t.residue < 0.0 || t.pole < 0.0) out.nonnegative_coefficients = false;

  const int n = static_cast<int>(pfs.order() + pfs.fir().size());
  const Signal g = impulse_response(pfs, std::max(2 * n + 1, horizon + J));
  if (n == 0) {
    out.hankel_definite = true;
  } else {
    const Eigen::MatrixXd H1 = hankel_matrix(g, 1, n).entries;
    const Eigen::MatrixXd H2 = hankel_matrix(g, 2, n).entries;
    out.hankel_definite = is_pd(H1);
    if (out.hankel_definite) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H2, Eigen::EigenvaluesOnly);
      out.hankel_definite = es.eigenvalues().minCoeff() >= -kPsdTol * H2.cwiseAbs().maxCoeff();
    }
  }

  double peak = 0.0;
  for (double v : g.values()) peak = std::max(peak, std::abs(v));
  std::vector<double> window;
  for (int t = 1; t <= horizon + J; ++t) window.push_back(g(t));
  Signal d(1, window);
  out.alternating_differences = true;
  for (int j = 0; j <= J && out.alternating_differences; ++j) {
    if (j > 0) d = forward_difference(d, 1);
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    const double tol = kPsdTol * std::pow(2.0, j) * peak;
    for (int t = 1; t < horizon; ++t)
      if (sign * d(t) < -tol) {
        out.alternating_differences = false;
        break;
      }
  }
  return out;
}

// ---- decompositions -------------------------------------------------------------

Decomposition hankel_decompose(const PartialFractionSystem& pfs, int k, int horizon) {
  if (k < 1) throw std::invalid_argument("hankel_decompose: k must be >= 1");
  const PositivityReport pre = check_hankel_k(pfs, k, horizon);
  if (pre.verdict == Verdict::Refuted)
    throw StructuralError("hankel_decompose: system is not Hankel " + std::to_string(k) +
                          "-positive (" + (pre.witness ? pre.witness->detail : std::string("refuted")) + ")");
  Decomposition d;
  d.mode = DecompositionMode::HankelAdditive;
  d.k = k;
  const auto& terms = pfs.terms();
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(k), terms.size());
  d.dominant = PartialFractionSystem(std::vector<PoleResidue>(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(m)));
  PartialFractionSystem rest(std::vector<PoleResidue>(terms.begin() + static_cast<std::ptrdiff_t>(m), terms.end()),
                             pfs.fir());
  if (!rest.is_zero()) d.remainder = System(rest);
  d.dominant_total = check_hankel_total(d.dominant).verdict == Verdict::Certified;
  d.notes.push_back(std::string("dominant part Hankel totally positive: ") + (d.dominant_total ? "yes" : "no"));

  d.recursive_claim = true;
  for (std::size_t i = 1; i < m; ++i) {
    PartialFractionSystem tail(std::vector<PoleResidue>(terms.begin() + static_cast<std::ptrdiff_t>(i), terms.end()),
                               pfs.fir());
    const int level = k - static_cast<int>(i);
    const CoefficientCheck coeff = necessary_coefficients(tail, level, OperatorKind::Hankel);
    const Verdict v = check_hankel_k(tail, level, horizon).verdict;
    const bool ok = coeff.passed && v != Verdict::Refuted;
    d.recursive_claim = d.recursive_claim && ok;
    d.notes.push_back("tail after " + std::to_string(i) + " term(s) at level " + std::to_string(level) + ": " +
                      (coeff.passed ? "coefficients ok" : coeff.reason) + ", verdict " + to_string(v));
  }
  return d;
}

Decomposition toeplitz_decompose(const RationalTransferFunction& rtf, int k, int horizon) {
  if (k < 1) throw std::invalid_argument("toeplitz_decompose: k must be >= 1");
  const PositivityReport pre = check_toeplitz_k(rtf, k, horizon);
  if (pre.verdict == Verdict::Refuted)
    throw StructuralError("toeplitz_decompose: system is not Toeplitz " + std::to_string(k) +
                          "-positive (" + (pre.witness ? pre.witness->detail : std::string("refuted")) + ")");
  std::vector<Complex> p = rtf.poles();
  std::vector<Complex> z = rtf.zeros();
  if (!is_real(p.front())) throw StructuralError("toeplitz_decompose: dominant pole is not real");
  Decomposition d;
  d.mode = DecompositionMode::ToeplitzMultiplicative;
  d.k = k;
  d.factor_pole = p.front().real();

  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(k), p.size());
  const double pmin = p[m - 1].real();
  d.zeros_below_pole = std::all_of(z.begin(), z.end(), [&](const Complex& q) { return !is_real(q) || q.real() < pmin; });
  d.notes.push_back(std::string("real zeros of G below p_min(k,n) = ") + fmt(pmin) + ": " +
                    (d.zeros_below_pole ? "yes" : "no") + " (checked on G; the clause could also be read on G_r)");

  p.erase(p.begin());
  auto origin = std::find_if(z.begin(), z.end(), [](const Complex& q) { return std::abs(q) <= 1e-12; });
  if (origin == z.end())
    throw StructuralError("toeplitz_decompose: G(z)(z - p1)/z is not strictly proper (no zero at the origin)");
  z.erase(origin);
  if (p.empty()) throw StructuralError("toeplitz_decompose: first-order system leaves no strictly proper remainder");
  d.remainder = System(RationalTransferFunction::from_roots(rtf.gain(), z, p));
  d.recursive_claim = k == 1 || check_toeplitz_k(*d.remainder, k - 1, horizon).verdict != Verdict::Refuted;
  d.dominant_total = d.factor_pole >= 0.0;
  return d;
}

Signal recombined_impulse(const Decomposition& d, int horizon) {
  std::vector<double> out(static_cast<std::size_t>(horizon) + 1, 0.0);
  const Signal r = d.remainder ? impulse_response(*d.remainder, horizon) : Signal{};
  if (d.mode == DecompositionMode::HankelAdditive) {
    const Signal a = impulse_response(d.dominant, horizon);
    for (int t = 0; t <= horizon; ++t) out[static_cast<std::size_t>(t)] = a(t) + r(t);
  } else {
    for (int t = 0; t <= horizon; ++t) {
      double acc = 0.0, power = 1.0;  // h(s) = p1^s for s >= 0
      for (int s = 0; s <= t; ++s) {
        acc += power * r(t - s);
        power *= d.factor_pole;
      }
      out[static_cast<std::size_t>(t)] = acc;
    }
  }
  return Signal::from_values(std::move(out));
}

// ---- structural checks ------------------------------------------------------------

RepeatedPoleResult repeated_pole_check(const StateSpace& ss, int k) {
  if (k < 1) throw std::invalid_argument("repeated_pole_check: k must be >= 1");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(ss.A(), false);
  std::vector<Complex> lambda;
  for (Eigen::Index i = 0; i < ss.A().rows(); ++i) {
    Complex z = solver.eigenvalues()[i];
    if (std::abs(z.imag()) <= kRealSnapTol * (1.0 + std::abs(z))) z = Complex(z.real(), 0.0);
    lambda.push_back(z);
  }
  sort_pole_order(lambda);
  RepeatedPoleResult out;
  std::vector<int> cluster_of(lambda.size(), -1);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (cluster_of[i] >= 0) continue;
    cluster_of[i] = static_cast<int>(out.clusters.size());
    PoleCluster c{lambda[i], 1};
    for (std::size_t j = i + 1; j < lambda.size(); ++j)
      if (cluster_of[j] < 0 && std::abs(lambda[j] - lambda[i]) <= 1e-6 * (1.0 + std::abs(lambda[i]))) {
        cluster_of[j] = cluster_of[i];
        ++c.multiplicity;
      }
    out.clusters.push_back(c);
  }
  const int n = ss.order();
  const int kk = std::min(k, n);
  const int simple_needed = k >= n ? n : kk - 1;
  for (int i = 0; i < simple_needed; ++i) {
    const auto& c = out.clusters[static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(i)])];
    if (c.multiplicity > 1) {
      out.passed = false;
      out.reason = "eigenvalue " + fmt(c.value) + " has multiplicity " + std::to_string(c.multiplicity);
      return out;
    }
  }
  if (kk >= 2) {
    const Complex p = lambda[static_cast<std::size_t>(kk - 2)];
    if (!is_real(p) || p.real() <= 0.0) {
      out.passed = false;
      out.reason = "p_" + std::to_string(kk - 1) + " = " + fmt(p) + " is not positive";
      return out;
    }
  }
  return out;
}

DiffSystem diff_system(const PartialFractionSystem& pfs) {
  std::vector<PoleResidue> terms;
  for (const auto& t : pfs.terms()) terms.push_back({t.residue * (1.0 - t.pole), t.pole});
  std::vector<double> fir = pfs.fir();
  for (std::size_t l = 0; l < fir.size(); ++l) fir[l] = pfs.fir()[l] - (l + 1 < fir.size() ? pfs.fir()[l + 1] : 0.0);
  DiffSystem d;
  d.system = PartialFractionSystem(std::move(terms), std::move(fir));
  d.feedthrough = -impulse_response(pfs, 1)(1);
  return d;
}

Signal impulse_response(const DiffSystem& d, int horizon) {
  const Signal g = impulse_response(d.system, horizon);
  std::vector<double> v(g.values().begin(), g.values().end());
  v[0] += d.feedthrough;
  return Signal::from_values(std::move(v));
}

}  // namespace kpos
