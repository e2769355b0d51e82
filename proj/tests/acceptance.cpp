// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "kpos/compound.hpp"
#include "kpos/oracle.hpp"
#include "kpos/positivity.hpp"
#include "kpos/totpos.hpp"
#include "test_support.hpp"

using namespace kpos;

namespace {

// Pinned tolerances.
constexpr double kAc1Tol = 1e-9;
constexpr double kAc2Rel = 1e-8;
constexpr double kAc3Tol = 1e-12;
constexpr double kAc6Rel = 1e-9;
constexpr double kAc8Rel = 1e-9;

// Runtime budgets in seconds.
constexpr double kAc1Budget = 1.0;
constexpr double kAc2Budget = 10.0;
constexpr double kAc4Budget = 5.0;
constexpr double kAc6Budget = 10.0;
constexpr double kAc7Budget = 60.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(const char* id, const char* title, double budget, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget > 0 && secs > budget) {
    out.pass = false;
    out.detail += "; runtime budget " + std::to_string(budget) + " s exceeded";
  }
  failures += out.pass ? 0 : 1;
  std::printf("[%s] %s %s (%.3f s): %s\n", out.pass ? "PASS" : "FAIL", id, title, secs, out.detail.c_str());
  std::fflush(stdout);
}

double hadamard_scale(const Eigen::MatrixXd& H) {
  double s = 1.0;
  for (Eigen::Index i = 0; i < H.rows(); ++i) s *= H.row(i).cwiseAbs().maxCoeff();
  return s;
}

Outcome ac1() {
  const Signal g = impulse_response(fig1_system(), 40);
  Outcome o;
  std::ostringstream d;
  const Signal ya = apply_hankel(g, std::vector<double>{1, -10}, 8);
  bool all_negative = true;
  for (double v : ya.values()) all_negative = all_negative && v < 0;
  const bool a = all_negative && variation(ya) == 0 && std::abs(ya(0) + 9.2) <= kAc1Tol;
  const Signal yb = apply_toeplitz(g, Signal(0, {10, -8.5}), 8);
  const bool b = std::abs(yb(1) - 13.0) <= kAc1Tol && variation(yb) == 2;
  const Signal yc = apply_hankel(g, std::vector<double>{10.9, -21.5, 9.7}, 8);
  const bool c = variation(yc) == 2 && first_nonzero_sign(yc) != 1;
  d << "(a) y(0)=" << ya(0) << " S=" << variation(ya) << "; (b) y(1)=" << yb(1) << " S=" << variation(yb)
    << "; (c) S=" << variation(yc) << " sign y(0)=" << first_nonzero_sign(yc) << " vs sign u(-1)=+1";
  o.pass = a && b && c;
  o.detail = d.str();
  return o;
}

Outcome ac2() {
  std::mt19937_64 rng(0xAC2);
  std::uniform_int_distribution<int> order(2, 4);
  const char* names[3] = {"det/realization", "det/closed form", "realization/closed form"};
  int compared[3] = {0, 0, 0}, bad[3] = {0, 0, 0};
  double worst[3] = {0, 0, 0}, worst_scaled = 0.0;
  for (int s = 0; s < 50; ++s) {
    const int n = order(rng);
    const auto pfs = kpos::testing::random_pfs(rng, n, -1.0, 1.0, 0.01, 0.99, 1e-3);
    const Signal g = impulse_response(pfs, 20 + 2 * n);
    for (int j = 2; j <= n; ++j) {
      const Signal det_form = compound_impulse(g, j, 20);
      const Signal real_form = impulse_response(compound_realization(to_state_space(pfs), j), 20);
      const Signal closed = impulse_response(compound_transfer(pfs, j), 20);
      for (int t = 1; t <= 20; ++t) {
        const double scale = hadamard_scale(hankel_matrix(g, t, j).entries);
        const double v[3] = {det_form(t), real_form(t), closed(t)};
        const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (int p = 0; p < 3; ++p) {
          const double x = v[pairs[p][0]], y = v[pairs[p][1]];
          const double gap = std::abs(x - y), mag = std::max(std::abs(x), std::abs(y));
          const double rel = mag > 0 ? gap / mag : gap;
          worst[p] = std::max(worst[p], rel);
          worst_scaled = std::max(worst_scaled, gap / std::max(mag, scale));
          ++compared[p];
          if (rel > kAc2Rel) ++bad[p];
        }
      }
    }
  }
  std::ostringstream d;
  d << "plain relative gaps above " << kAc2Rel << ":";
  for (int p = 0; p < 3; ++p) d << " " << names[p] << " " << bad[p] << "/" << compared[p] << " (worst " << worst[p] << ")";
  d << "; worst gap relative to the Hadamard scale of H_g(t,j) " << worst_scaled;
  if (bad[0] + bad[1] > 0)
    d << "; the determinant of double-precision samples loses relative accuracy when |det| is far below the "
         "Hadamard scale (cancellation), so plain relative agreement is out of reach for late t";
  return {bad[0] + bad[1] + bad[2] == 0, d.str()};
}

Outcome ac3() {
  const auto sys = fig1_system();
  const Verdict h2 = check_hankel_k(sys, 2).verdict, h3 = check_hankel_k(sys, 3).verdict;
  const Verdict t2 = check_toeplitz_k(sys, 2).verdict;
  const auto nc = neuronal_condition(0.9, 0.5, 0.1, 0.9, 0.5, 0.1);
  const double g2 = compound_impulse(impulse_response(sys, 4), 2, 1)(1);
  std::ostringstream d;
  d << "hankel k=2 " << to_string(h2) << ", k=3 " << to_string(h3) << "; toeplitz k=2 " << to_string(t2)
    << "; margin " << nc.margin << ", g_[2](1) " << g2;
  const bool pass = h2 == Verdict::Certified && h3 == Verdict::Refuted && t2 == Verdict::Refuted &&
                    std::abs(nc.margin - g2) <= kAc3Tol && std::abs(nc.margin - 0.0064) <= kAc3Tol;
  return {pass, d.str()};
}

Outcome ac4() {
  int cells = 0, mismatches = 0, off_boundary = 0;
  std::ostringstream d;
  for (double a : {0.5, 1.0, 2.0})
    for (double alpha : {0.5, 1.0}) {
      int line_mismatch = 0;
      for (int i = 0; i <= 20; ++i) {
        const double beta = 1.0 + 0.25 * i;
        const HeavyBallResult hb = heavy_ball(a, alpha, beta);
        ++cells;
        if (hb.threshold_tp == hb.pole_test_tp) continue;
        ++mismatches;
        ++line_mismatch;
        if (std::abs(beta - hb.threshold) > 0.25) ++off_boundary;
        d << " mismatch at (a=" << a << ", alpha=" << alpha << ", beta=" << beta << ");";
      }
      if (line_mismatch > 1) ++off_boundary;
    }
  // the a = 1, alpha = 1 boundary: smallest grid beta with a totally positive closed loop
  double first_tp = -1.0;
  for (int i = 0; i <= 20 && first_tp < 0; ++i)
    if (heavy_ball(1, 1, 1.0 + 0.25 * i).pole_test_tp) first_tp = 1.0 + 0.25 * i;
  const double threshold = heavy_ball(1, 1, 4).threshold;
  std::ostringstream head;
  head << cells << " cells, " << mismatches << " mismatches (" << off_boundary
       << " away from the boundary); a=alpha=1 threshold " << threshold << ", first totally positive grid beta "
       << first_tp << ";" << d.str();
  return {off_boundary == 0 && threshold == 4.0 && first_tp == 4.0, head.str()};
}

PartialFractionSystem relaxation_instance(std::mt19937_64& rng, bool perturb) {
  std::uniform_int_distribution<int> order(1, 4);
  std::uniform_real_distribution<double> R(0.3, 1.0), big(1.5, 3.0);
  const int n = order(rng);
  const auto poles = kpos::testing::random_poles(rng, n, 0.05, 0.95, 0.15);
  std::vector<PoleResidue> terms;
  for (double p : poles) terms.push_back({R(rng), p});
  if (perturb) {
    std::uniform_int_distribution<int> which(0, n - 1), mode(0, 1);
    auto& t = terms[static_cast<std::size_t>(which(rng))];
    if (mode(rng) == 0) t.residue = -big(rng);
    else t.pole = -std::max(t.pole, 0.3);
  }
  return PartialFractionSystem(terms);
}

Outcome ac5() {
  std::mt19937_64 rng(0xAC5);
  int disagree = 0, pos_ok = 0, neg_ok = 0;
  for (int i = 0; i < 200; ++i) {
    const auto r = check_relaxation(relaxation_instance(rng, false), 6, 40);
    if (!r.agree()) ++disagree;
    else if (r.nonnegative_coefficients) ++pos_ok;
  }
  for (int i = 0; i < 200; ++i) {
    const auto r = check_relaxation(relaxation_instance(rng, true), 6, 40);
    if (!r.agree()) ++disagree;
    else if (!r.nonnegative_coefficients) ++neg_ok;
  }
  std::ostringstream d;
  d << "400 instances, " << disagree << " disagreements; " << pos_ok << "/200 positive all-true, " << neg_ok
    << "/200 perturbed all-false";
  return {disagree == 0 && pos_ok == 200 && neg_ok == 200, d.str()};
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::MatrixXd X(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) X(i, j) = U(rng);
  return X;
}

Outcome ac6() {
  std::mt19937_64 rng(0xAC6);
  int cb = 0, spec = 0, lift = 0, dj = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = 1 + trial % 3;
    const Eigen::MatrixXd A = random_matrix(rng, 4, 5), B = random_matrix(rng, 5, 4);
    const Eigen::MatrixXd lhs = compound_matrix(A * B, r), rhs = compound_matrix(A, r) * compound_matrix(B, r);
    if ((lhs - rhs).cwiseAbs().maxCoeff() > kAc6Rel * std::max(1.0, rhs.cwiseAbs().maxCoeff())) ++cb;

    const Eigen::MatrixXd M = random_matrix(rng, 4, 4);
    const Eigen::MatrixXd S = M + M.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    std::vector<double> expected;
    for (const auto& v : enumerate_tuples(4, r)) {
      double p = 1.0;
      for (int e : v.elements) p *= es.eigenvalues()(e - 1);
      expected.push_back(p);
    }
    const Eigen::MatrixXd CS = compound_matrix(S, r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(0.5 * (CS + CS.transpose()), Eigen::EigenvaluesOnly);
    std::vector<double> got(ec.eigenvalues().data(), ec.eigenvalues().data() + ec.eigenvalues().size());
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    const double norm = std::max(std::abs(expected.front()), std::abs(expected.back()));
    for (std::size_t i = 0; i < got.size(); ++i)
      if (std::abs(got[i] - expected[i]) > kAc6Rel * std::max(1.0, norm)) {
        ++spec;
        break;
      }

    const Eigen::MatrixXd L = random_matrix(rng, 5, 4);
    const Eigen::MatrixXd P = L * L.transpose();
    const Eigen::MatrixXd CP = compound_matrix(P, r + 1);
    if (!is_psd(0.5 * (CP + CP.transpose()), kAc6Rel)) ++lift;

    const Eigen::MatrixXd D = random_matrix(rng, 3 + trial % 4, 3 + trial % 4);
    double scale = 1.0;
    for (Eigen::Index i = 0; i < D.rows(); ++i) scale *= D.row(i).norm();
    if (desnanot_jacobi_residual(D) > kAc6Rel * std::max(1.0, scale * scale)) ++dj;
  }
  std::ostringstream d;
  d << "1000 trials each; failures: Cauchy-Binet " << cb << ", compound spectrum " << spec << ", PSD lifting " << lift
    << ", Desnanot-Jacobi " << dj;
  return {cb + spec + lift + dj == 0, d.str()};
}

struct OracleCase {
  std::string name;
  System sys;
  std::vector<std::vector<double>> hankel_vectors, toeplitz_vectors;
};

Outcome ac7() {
  std::vector<OracleCase> cases;
  cases.push_back({"three-term", fig1_system(), {{1, -10}, {10.9, -21.5, 9.7}}, {{10, -8.5}}});
  cases.push_back({"totally positive 3-term", PartialFractionSystem({{1, 0.9}, {1, 0.5}, {1, 0.2}}), {}, {}});
  cases.push_back({"alternating 2-term",
                   RationalTransferFunction::from_roots(1.0, {Complex(0, 0)}, {Complex(0.9, 0), Complex(0.5, 0)}),
                   {},
                   {}});
  int checked = 0, agree = 0, skipped = 0;
  std::ostringstream d;
  for (const auto& c : cases)
    for (OperatorKind kind : {OperatorKind::Hankel, OperatorKind::Toeplitz})
      for (int k = 1; k <= 3; ++k) {
        const PositivityReport rep = kind == OperatorKind::Hankel ? check_hankel_k(c.sys, k) : check_toeplitz_k(c.sys, k);
        if (rep.verdict != Verdict::Certified && rep.verdict != Verdict::Refuted) {
          ++skipped;
          continue;
        }
        OvdVerifyOptions opt;
        opt.samples = 2000;
        opt.mandatory = kind == OperatorKind::Hankel ? c.hankel_vectors : c.toeplitz_vectors;
        const OvdVerification ov = ovd_verify(c.sys, kind, k, 6, 12, opt);
        ++checked;
        // rank precondition: the truncation must carry the full operator rank
        const int expected_rank = kind == OperatorKind::Hankel ? std::min(6, system_order(c.sys)) : 6;
        bool ok = ov.rank == expected_rank;
        if (rep.verdict == Verdict::Certified) ok = ok && ov.passed;
        else ok = ok && !ov.passed && !ov.counterexamples.empty();
        agree += ok;
        d << " " << c.name << "/" << to_string(kind) << "/k=" << k << ":" << to_string(rep.verdict) << "/"
          << (ov.passed ? "pass" : "cex") << (ok ? "" : "(MISMATCH)") << ";";
      }
  std::ostringstream head;
  head << agree << "/" << checked << " verdicts confirmed, " << skipped << " not Certified/Refuted;" << d.str();
  return {agree == checked && checked > 0, head.str()};
}

double max_rel_gap(const Signal& a, const Signal& b, int horizon) {
  double gap = 0.0, scale = 0.0;
  for (int t = 0; t <= horizon; ++t) {
    gap = std::max(gap, std::abs(a(t) - b(t)));
    scale = std::max(scale, std::abs(b(t)));
  }
  return scale > 0 ? gap / scale : gap;
}

Outcome ac8() {
  std::mt19937_64 rng(0xAC8);
  int hankel_runs = 0, toeplitz_runs = 0, bad = 0;
  double worst = 0.0;
  std::vector<PartialFractionSystem> hsys{fig1_system(), PartialFractionSystem({{1, 0.9}, {1, 0.5}, {1, 0.2}})};
  for (int i = 0; i < 60; ++i) hsys.push_back(kpos::testing::random_pfs(rng, 1 + i % 4, -0.4, 1.0, 0.05, 0.95, 0.05));
  for (const auto& s : hsys)
    for (int k = 1; k <= static_cast<int>(s.order()) + 1; ++k) {
      if (check_hankel_k(s, k).verdict == Verdict::Refuted) continue;
      const Decomposition d = hankel_decompose(s, k);
      const double rel = max_rel_gap(recombined_impulse(d, 64), impulse_response(s, 64), 64);
      worst = std::max(worst, rel);
      bad += rel > kAc8Rel;
      ++hankel_runs;
    }

  std::vector<RationalTransferFunction> tsys;
  tsys.push_back(RationalTransferFunction::from_roots(1.0, {Complex(0, 0)}, {Complex(0.9, 0), Complex(0.5, 0)}));
  std::uniform_real_distribution<double> Z(-0.9, 0.0), G(0.5, 2.0);
  for (int i = 0; i < 60; ++i) {
    const int n = 2 + i % 3;
    const auto p = kpos::testing::random_poles(rng, n, 0.05, 0.95, 0.05);
    std::vector<Complex> poles, zeros{Complex(0, 0)};
    for (double q : p) poles.emplace_back(q, 0.0);
    for (int z = 0; z < n - 2; ++z) zeros.emplace_back(i % 2 ? Z(rng) : -Z(rng) * 0.5, 0.0);
    tsys.push_back(RationalTransferFunction::from_roots(G(rng), zeros, poles));
  }
  for (const auto& s : tsys)
    for (int k = 1; k <= s.order() + 1; ++k) {
      if (check_toeplitz_k(s, k).verdict == Verdict::Refuted) continue;
      const Decomposition d = toeplitz_decompose(s, k);
      const double rel = max_rel_gap(recombined_impulse(d, 64), impulse_response(s, 64), 64);
      worst = std::max(worst, rel);
      bad += rel > kAc8Rel;
      ++toeplitz_runs;
    }

  const Decomposition ex = toeplitz_decompose(tsys.front(), 2);
  const auto& rem = std::get<RationalTransferFunction>(*ex.remainder);
  const bool exact = rem.numerator() == Poly{1.0} && rem.denominator() == Poly{1.0, -0.5};
  std::ostringstream d;
  d << hankel_runs << " Hankel and " << toeplitz_runs << " Toeplitz decompositions, worst relative gap " << worst
    << ", " << bad << " above " << kAc8Rel << "; remainder of z/((z-0.9)(z-0.5)) "
    << (exact ? "is exactly 1/(z-0.5)" : "differs from 1/(z-0.5)");
  return {bad == 0 && exact && hankel_runs > 0 && toeplitz_runs > 0, d.str()};
}

}  // namespace

int main() {
  criterion("AC1", "worked three-term operator outputs", kAc1Budget, ac1);
  criterion("AC2", "compound triangle", kAc2Budget, ac2);
  criterion("AC3", "three-term classification and neuronal margin", 0, ac3);
  criterion("AC4", "heavy-ball threshold", kAc4Budget, ac4);
  criterion("AC5", "relaxation equivalence", 0, ac5);
  criterion("AC6", "matrix-layer identities", kAc6Budget, ac6);
  criterion("AC7", "oracle agreement", kAc7Budget, ac7);
  criterion("AC8", "decomposition round trip", 0, ac8);
  return failures == 0 ? 0 : 1;
}
