#include "kpos/lti.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kpos/error.hpp"

namespace kpos {

namespace {

constexpr double kRepeatedPoleTol = 1e-12;   // PartialFractionSystem distinctness
constexpr double kSimplePoleTol = 1e-7;      // modal expansions of computed roots
constexpr double kCancellationTol = 1e-9;    // pole/zero coincidence
constexpr double kNumeratorTrimTol = 1e-13;  // leading cancellation in recombined numerators

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool has_repeated(const std::vector<Complex>& values, double rel_tol) {
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const double scale = 1.0 + std::max(std::abs(values[i]), std::abs(values[j]));
      if (std::abs(values[i] - values[j]) <= rel_tol * scale) return true;
    }
  return false;
}

std::vector<Complex> eigenvalues_sorted(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    Complex z = solver.eigenvalues()[i];
    if (std::abs(z.imag()) <= kRealSnapTol * (1.0 + std::abs(z))) z = Complex(z.real(), 0.0);
    out.push_back(z);
  }
  sort_pole_order(out);
  return out;
}

}  // namespace

// ---- PartialFractionSystem ---------------------------------------------------

PartialFractionSystem::PartialFractionSystem(std::vector<PoleResidue> terms, std::vector<double> fir)
    : fir_(std::move(fir)) {
  for (const auto& term : terms) {
    if (!std::isfinite(term.residue) || !std::isfinite(term.pole))
      throw std::invalid_argument("PartialFractionSystem: non-finite residue or pole");
    if (term.residue != 0.0) terms_.push_back(term);
  }
  if (!all_finite(fir_)) throw std::invalid_argument("PartialFractionSystem: non-finite FIR sample");
  while (!fir_.empty() && fir_.back() == 0.0) fir_.pop_back();
  std::stable_sort(terms_.begin(), terms_.end(), [](const PoleResidue& a, const PoleResidue& b) {
    return pole_order_less(Complex(a.pole, 0.0), Complex(b.pole, 0.0));
  });
  for (std::size_t i = 0; i + 1 < terms_.size(); ++i) {
    const double p = terms_[i].pole, q = terms_[i + 1].pole;
    if (std::abs(p - q) <= kRepeatedPoleTol * std::max({1.0, std::abs(p), std::abs(q)}))
      throw UnsupportedRepresentation("PartialFractionSystem: repeated pole " + std::to_string(p) +
                                      "; use a state-space realization");
  }
}

PartialFractionSystem PartialFractionSystem::from_lists(std::span<const double> residues,
                                                        std::span<const double> poles, std::vector<double> fir) {
  if (residues.size() != poles.size())
    throw std::invalid_argument("PartialFractionSystem: residues and poles differ in length");
  std::vector<PoleResidue> terms;
  for (std::size_t i = 0; i < poles.size(); ++i) terms.push_back({residues[i], poles[i]});
  return PartialFractionSystem(std::move(terms), std::move(fir));
}

std::vector<double> PartialFractionSystem::poles() const {
  std::vector<double> out;
  for (const auto& t : terms_) out.push_back(t.pole);
  return out;
}

std::vector<double> PartialFractionSystem::residues() const {
  std::vector<double> out;
  for (const auto& t : terms_) out.push_back(t.residue);
  return out;
}

PartialFractionSystem PartialFractionSystem::scaled(double factor) const {
  std::vector<PoleResidue> terms = terms_;
  for (auto& t : terms) t.residue *= factor;
  std::vector<double> fir = fir_;
  for (double& d : fir) d *= factor;
  return PartialFractionSystem(std::move(terms), std::move(fir));
}

// ---- RationalTransferFunction ------------------------------------------------

RationalTransferFunction RationalTransferFunction::from_coefficients(Poly numerator, Poly denominator) {
  if (!all_finite(numerator) || !all_finite(denominator))
    throw std::invalid_argument("RationalTransferFunction: non-finite coefficient");
  numerator = trim(std::move(numerator));
  denominator = trim(std::move(denominator));
  if (denominator.empty()) throw StructuralError("RationalTransferFunction: zero denominator");
  if (numerator.empty()) throw StructuralError("RationalTransferFunction: zero numerator (degenerate system)");
  const double lead = denominator.front();
  RationalTransferFunction rtf;
  rtf.num_ = scale(numerator, 1.0 / lead);
  rtf.den_ = scale(denominator, 1.0 / lead);
  rtf.den_.front() = 1.0;
  if (degree(rtf.num_) >= degree(rtf.den_))
    throw StructuralError("RationalTransferFunction: system must be strictly proper");
  rtf.poles_ = roots(rtf.den_);
  rtf.zeros_ = rtf.num_.size() > 1 ? roots(rtf.num_) : std::vector<Complex>{};
  rtf.validate();
  return rtf;
}

RationalTransferFunction RationalTransferFunction::from_roots(double gain, std::vector<Complex> zeros,
                                                              std::vector<Complex> poles) {
  if (gain == 0.0 || !std::isfinite(gain))
    throw StructuralError("RationalTransferFunction: gain must be finite and nonzero");
  if (zeros.size() >= poles.size())
    throw StructuralError("RationalTransferFunction: system must be strictly proper");
  RationalTransferFunction rtf;
  rtf.num_ = scale(kpos::from_roots(zeros), gain);
  rtf.den_ = kpos::from_roots(poles);
  sort_pole_order(zeros);
  sort_pole_order(poles);
  rtf.zeros_ = std::move(zeros);
  rtf.poles_ = std::move(poles);
  rtf.validate();
  return rtf;
}

void RationalTransferFunction::validate() const {
  for (const Complex& z : zeros_)
    for (const Complex& p : poles_)
      if (std::abs(z - p) <= kCancellationTol * (1.0 + std::abs(p)))
        throw StructuralError("RationalTransferFunction: pole and zero coincide near " +
                              std::to_string(p.real()));
}

// ---- StateSpace ----------------------------------------------------------------

StateSpace::StateSpace(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::RowVectorXd c)
    : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {
  const auto n = A_.rows();
  if (n < 1 || A_.cols() != n) throw std::invalid_argument("StateSpace: A must be square with n >= 1");
  if (b_.size() != n || c_.size() != n) throw std::invalid_argument("StateSpace: b and c must have length n");
  if (!A_.allFinite() || !b_.allFinite() || !c_.allFinite())
    throw std::invalid_argument("StateSpace: non-finite entry");
}

// ---- impulse responses ---------------------------------------------------------

Signal impulse_response(const PartialFractionSystem& sys, int horizon) {
  if (horizon < 1) throw std::invalid_argument("impulse_response: horizon must be >= 1");
  std::vector<double> g(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (const auto& term : sys.terms()) {
    double power = 1.0;  // p^(t-1)
    for (int t = 1; t <= horizon; ++t) {
      g[static_cast<std::size_t>(t)] += term.residue * power;
      power *= term.pole;
    }
  }
  for (std::size_t l = 0; l < sys.fir().size() && l + 1 <= static_cast<std::size_t>(horizon); ++l)
    g[l + 1] += sys.fir()[l];
  return Signal::from_values(std::move(g));
}

Signal impulse_response(const RationalTransferFunction& sys, int horizon) {
  if (horizon < 1) throw std::invalid_argument("impulse_response: horizon must be >= 1");
  const Poly& den = sys.denominator();
  const int n = sys.order();
  // b_k: coefficient of z^(n-k) in the numerator.
  std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
  const Poly& num = sys.numerator();
  for (std::size_t i = 0; i < num.size(); ++i) b[b.size() - num.size() + i] = num[i];
  std::vector<double> g(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (int t = 0; t <= horizon; ++t) {
    double acc = t <= n ? b[static_cast<std::size_t>(t)] : 0.0;
    for (int i = 1; i <= n && i <= t; ++i) acc -= den[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(t - i)];
    g[static_cast<std::size_t>(t)] = acc;
  }
  return Signal::from_values(std::move(g));
}

Signal impulse_response(const StateSpace& sys, int horizon) {
  if (horizon < 1) throw std::invalid_argument("impulse_response: horizon must be >= 1");
  std::vector<double> g(static_cast<std::size_t>(horizon) + 1, 0.0);
  Eigen::VectorXd x = sys.b();
  for (int t = 1; t <= horizon; ++t) {
    g[static_cast<std::size_t>(t)] = sys.c().dot(x);
    x = sys.A() * x;
  }
  return Signal::from_values(std::move(g));
}

Signal impulse_response(const System& sys, int horizon) {
  return std::visit([horizon](const auto& s) { return impulse_response(s, horizon); }, sys);
}

// ---- conversions -----------------------------------------------------------------

PartialFractionSystem partial_fractions(const RationalTransferFunction& rtf) {
  const auto& p = rtf.poles();
  for (const Complex& z : p)
    if (!is_real(z))
      throw UnsupportedRepresentation("partial_fractions: complex pole; use a state-space realization");
  if (has_repeated(p, kCancellationTol))
    throw UnsupportedRepresentation("partial_fractions: repeated pole; use a state-space realization");
  std::vector<PoleResidue> terms;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double denom = 1.0;
    for (std::size_t j = 0; j < p.size(); ++j)
      if (j != i) denom *= p[i].real() - p[j].real();
    terms.push_back({evaluate(rtf.numerator(), p[i].real()) / denom, p[i].real()});
  }
  return PartialFractionSystem(std::move(terms));
}

RationalTransferFunction recombine(const PartialFractionSystem& pfs) {
  if (pfs.is_zero()) throw StructuralError("recombine: zero system has no rational form");
  const auto& terms = pfs.terms();
  const std::size_t m = pfs.fir().size();
  Poly modal_den{1.0};
  for (const auto& t : terms) modal_den = multiply(modal_den, Poly{1.0, -t.pole});
  Poly num{0.0};
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Poly part{terms[i].residue};
    for (std::size_t j = 0; j < terms.size(); ++j)
      if (j != i) part = multiply(part, Poly{1.0, -terms[j].pole});
    num = add(num, part);
  }
  Poly shift(m + 1, 0.0);
  shift[0] = 1.0;  // z^m
  num = multiply(num, shift);
  if (m > 0) {
    Poly fir_poly(pfs.fir().begin(), pfs.fir().end());  // d_1 z^(m-1) + ... + d_m
    num = add(num, multiply(fir_poly, modal_den));
  }
  Poly den = multiply(modal_den, shift);
  num = trim(num, kNumeratorTrimTol);
  return RationalTransferFunction::from_coefficients(std::move(num), std::move(den));
}

StateSpace to_state_space(const PartialFractionSystem& pfs, Splitting splitting) {
  const auto& terms = pfs.terms();
  const Eigen::Index n_modal = static_cast<Eigen::Index>(terms.size());
  const Eigen::Index m = static_cast<Eigen::Index>(pfs.fir().size());
  const Eigen::Index n = std::max<Eigen::Index>(1, n_modal + m);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n_modal; ++i) {
    const auto& t = terms[static_cast<std::size_t>(i)];
    A(i, i) = t.pole;
    if (splitting == Splitting::Symmetric) {
      if (t.residue < 0.0) throw std::domain_error("to_state_space: symmetric splitting needs nonnegative residues");
      b(i) = std::sqrt(t.residue);
      c(i) = std::sqrt(t.residue);
    } else {
      b(i) = t.residue;
      c(i) = 1.0;
    }
  }
  if (m > 0) {
    const Eigen::Index o = n_modal;
    b(o) = 1.0;
    for (Eigen::Index l = 0; l < m; ++l) {
      c(o + l) = pfs.fir()[static_cast<std::size_t>(l)];
      if (l > 0) A(o + l, o + l - 1) = 1.0;
    }
  }
  return StateSpace(std::move(A), std::move(b), std::move(c));
}

StateSpace to_state_space(const RationalTransferFunction& rtf) {
  const int n = rtf.order();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) A(0, j) = -rtf.denominator()[static_cast<std::size_t>(j) + 1];
  for (int i = 1; i < n; ++i) A(i, i - 1) = 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = 1.0;
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(n);
  const Poly& num = rtf.numerator();
  for (std::size_t i = 0; i < num.size(); ++i) c(static_cast<Eigen::Index>(n - num.size() + i)) = num[i];
  return StateSpace(std::move(A), std::move(b), std::move(c));
}

StateSpace to_state_space(const System& sys) {
  return std::visit(
      [](const auto& s) -> StateSpace {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StateSpace>) return s;
        else return to_state_space(s);
      },
      sys);
}

RationalTransferFunction to_rational(const StateSpace& ss) {
  const int n = ss.order();
  std::vector<Complex> p = eigenvalues_sorted(ss.A());
  Poly den = from_roots(p);
  const Signal g = impulse_response(ss, n);
  Poly num(static_cast<std::size_t>(n), 0.0);
  for (int k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc += den[static_cast<std::size_t>(i)] * g(k - i);
    num[static_cast<std::size_t>(k) - 1] = acc;
  }
  num = trim(num, 1e-12);
  return RationalTransferFunction::from_coefficients(std::move(num), std::move(den));
}

RationalTransferFunction to_rational(const System& sys) {
  return std::visit(
      [](const auto& s) -> RationalTransferFunction {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RationalTransferFunction>) return s;
        else if constexpr (std::is_same_v<T, PartialFractionSystem>) return recombine(s);
        else return to_rational(s);
      },
      sys);
}

std::optional<ModalForm> modal_form(const System& sys) {
  ModalForm form;
  if (const auto* pfs = std::get_if<PartialFractionSystem>(&sys)) {
    for (const auto& t : pfs->terms()) {
      form.residues.emplace_back(t.residue, 0.0);
      form.poles.emplace_back(t.pole, 0.0);
    }
    form.fir = pfs->fir();
    return form;
  }
  if (const auto* rtf = std::get_if<RationalTransferFunction>(&sys)) {
    const auto& p = rtf->poles();
    if (has_repeated(p, kSimplePoleTol)) return std::nullopt;
    for (std::size_t i = 0; i < p.size(); ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < p.size(); ++j)
        if (j != i) denom *= p[i] - p[j];
      form.residues.push_back(evaluate(rtf->numerator(), p[i]) / denom);
      form.poles.push_back(p[i]);
    }
    return form;
  }
  const auto& ss = std::get<StateSpace>(sys);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(ss.A(), true);
  if (solver.info() != Eigen::Success) return std::nullopt;
  std::vector<Complex> lambda;
  for (Eigen::Index i = 0; i < ss.A().rows(); ++i) lambda.push_back(solver.eigenvalues()[i]);
  if (has_repeated(lambda, kSimplePoleTol)) return std::nullopt;
  const Eigen::MatrixXcd V = solver.eigenvectors();
  const Eigen::MatrixXcd Vinv = V.inverse();
  const Eigen::RowVectorXcd left = ss.c().cast<Complex>() * V;
  const Eigen::VectorXcd right = Vinv * ss.b().cast<Complex>();
  double total = 0.0;
  std::vector<Complex> r(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    r[i] = left(static_cast<Eigen::Index>(i)) * right(static_cast<Eigen::Index>(i));
    total += std::abs(r[i]);
  }
  std::vector<std::size_t> order(lambda.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pole_order_less(lambda[a], lambda[b]); });
  for (std::size_t i : order) {
    if (std::abs(r[i]) <= 1e-12 * total) continue;
    Complex pole = lambda[i];
    if (std::abs(pole.imag()) <= kRealSnapTol * (1.0 + std::abs(pole))) pole = Complex(pole.real(), 0.0);
    Complex res = r[i];
    if (pole.imag() == 0.0) res = Complex(res.real(), 0.0);
    form.residues.push_back(res);
    form.poles.push_back(pole);
  }
  return form;
}

std::optional<PartialFractionSystem> try_partial_fractions(const System& sys) {
  if (const auto* pfs = std::get_if<PartialFractionSystem>(&sys)) return *pfs;
  const auto form = modal_form(sys);
  if (!form) return std::nullopt;
  std::vector<PoleResidue> terms;
  for (std::size_t i = 0; i < form->poles.size(); ++i) {
    if (!is_real(form->poles[i])) return std::nullopt;
    const Complex r = form->residues[i];
    if (std::abs(r.imag()) > 1e-9 * (1.0 + std::abs(r))) return std::nullopt;
    terms.push_back({r.real(), form->poles[i].real()});
  }
  try {
    return PartialFractionSystem(std::move(terms), form->fir);
  } catch (const UnsupportedRepresentation&) {
    return std::nullopt;
  }
}

int system_order(const System& sys) {
  if (const auto* pfs = std::get_if<PartialFractionSystem>(&sys))
    return static_cast<int>(pfs->order() + pfs->fir().size());
  if (const auto* rtf = std::get_if<RationalTransferFunction>(&sys)) return rtf->order();
  return std::get<StateSpace>(sys).order();
}

std::vector<Complex> poles(const System& sys) {
  if (const auto* pfs = std::get_if<PartialFractionSystem>(&sys)) {
    std::vector<Complex> out;
    for (const auto& t : pfs->terms()) out.emplace_back(t.pole, 0.0);
    for (std::size_t l = 0; l < pfs->fir().size(); ++l) out.emplace_back(0.0, 0.0);
    sort_pole_order(out);
    return out;
  }
  if (const auto* rtf = std::get_if<RationalTransferFunction>(&sys)) return rtf->poles();
  return eigenvalues_sorted(std::get<StateSpace>(sys).A());
}

std::vector<Complex> zeros(const RationalTransferFunction& rtf) {
  if (degree(rtf.numerator()) < 0) throw StructuralError("zeros: zero numerator");
  return rtf.zeros();
}

// ---- structured matrices ---------------------------------------------------------

Eigen::MatrixXd extended_controllability(const StateSpace& ss, int j) {
  if (j < 1) throw std::invalid_argument("extended_controllability: j must be >= 1");
  Eigen::MatrixXd C(ss.order(), j);
  Eigen::VectorXd col = ss.b();
  for (int k = 0; k < j; ++k) {
    C.col(k) = col;
    col = ss.A() * col;
  }
  return C;
}

Eigen::MatrixXd extended_observability(const StateSpace& ss, int j) {
  if (j < 1) throw std::invalid_argument("extended_observability: j must be >= 1");
  Eigen::MatrixXd O(j, ss.order());
  Eigen::RowVectorXd row = ss.c();
  for (int k = 0; k < j; ++k) {
    O.row(k) = row;
    row = row * ss.A();
  }
  return O;
}

StructuredMatrixView hankel_matrix(const Signal& g, std::int64_t t, int j) {
  if (t < 1) throw std::invalid_argument("hankel_matrix: t must be >= 1");
  if (j < 1) throw std::invalid_argument("hankel_matrix: order must be >= 1");
  if (!g.covers(t, t + 2 * j - 2))
    throw std::out_of_range("hankel_matrix: signal does not cover t.." + std::to_string(t + 2 * j - 2));
  StructuredMatrixView view{MatrixKind::Hankel, t, j, Eigen::MatrixXd(j, j)};
  for (int a = 0; a < j; ++a)
    for (int b = 0; b < j; ++b) view.entries(a, b) = g(t + a + b);
  return view;
}

StructuredMatrixView toeplitz_matrix(const Signal& g, std::int64_t t, int j) {
  if (t < 0) throw std::invalid_argument("toeplitz_matrix: t must be >= 0");
  if (j < 1) throw std::invalid_argument("toeplitz_matrix: order must be >= 1");
  const std::int64_t first = std::max<std::int64_t>(0, t - j + 1);
  if (!g.covers(first, t + j - 1))
    throw std::out_of_range("toeplitz_matrix: signal does not cover " + std::to_string(first) + ".." +
                            std::to_string(t + j - 1));
  StructuredMatrixView view{MatrixKind::Toeplitz, t, j, Eigen::MatrixXd(j, j)};
  for (int a = 0; a < j; ++a)
    for (int b = 0; b < j; ++b) {
      const std::int64_t tau = t + a - b;
      view.entries(a, b) = tau < 0 ? 0.0 : g(tau);
    }
  return view;
}

}  // namespace kpos
