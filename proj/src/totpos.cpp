#include "kpos/totpos.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "kpos/error.hpp"
#include "kpos/signals.hpp"

namespace kpos {

namespace {

std::int64_t binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  std::int64_t out = 1;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

double determinant(const Eigen::MatrixXd& M) {
  if (M.rows() == 1) return M(0, 0);
  if (M.rows() == 2) return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(M).determinant();
}

double row_scale(const Eigen::MatrixXd& M) {
  double s = 1.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) s *= M.row(i).cwiseAbs().maxCoeff();
  return s;
}

IndexTuple interval(int n, int first, int r) {
  IndexTuple t{n, {}};
  for (int i = 0; i < r; ++i) t.elements.push_back(first + i);
  return t;
}

void check_symmetric(const Eigen::MatrixXd& X, const char* who) {
  if (X.rows() != X.cols()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
  const double peak = X.cwiseAbs().maxCoeff();
  if ((X - X.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(peak, 1e-300))
    throw std::invalid_argument(std::string(who) + ": matrix must be symmetric");
}

}  // namespace

bool IndexTuple::is_interval() const {
  for (std::size_t i = 1; i < elements.size(); ++i)
    if (elements[i] != elements[i - 1] + 1) return false;
  return true;
}

std::vector<IndexTuple> enumerate_tuples(int n, int r) {
  if (n < 1 || r < 1) throw std::invalid_argument("enumerate_tuples: need n >= 1 and r >= 1");
  std::vector<IndexTuple> out;
  if (r > n) return out;
  std::vector<int> v(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) v[static_cast<std::size_t>(i)] = i + 1;
  while (true) {
    out.push_back({n, v});
    int i = r - 1;
    while (i >= 0 && v[static_cast<std::size_t>(i)] == n - r + i + 1) --i;
    if (i < 0) break;
    ++v[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < r; ++k) v[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(k) - 1] + 1;
  }
  return out;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& X, const IndexTuple& I, const IndexTuple& J) {
  if (I.r() != J.r() || I.r() == 0) throw std::invalid_argument("minor: index tuples must have equal nonzero size");
  Eigen::MatrixXd M(I.r(), J.r());
  for (int a = 0; a < I.r(); ++a)
    for (int b = 0; b < J.r(); ++b) {
      const int i = I.elements[static_cast<std::size_t>(a)] - 1;
      const int j = J.elements[static_cast<std::size_t>(b)] - 1;
      if (i < 0 || j < 0 || i >= X.rows() || j >= X.cols()) throw std::invalid_argument("minor: index out of range");
      M(a, b) = X(i, j);
    }
  return M;
}

double minor(const Eigen::MatrixXd& X, const IndexTuple& I, const IndexTuple& J) {
  return determinant(submatrix(X, I, J));
}

double minor_scale(const Eigen::MatrixXd& X, const IndexTuple& I, const IndexTuple& J) {
  return row_scale(submatrix(X, I, J));
}

Eigen::MatrixXd compound_matrix(const Eigen::MatrixXd& X, int r) {
  if (r < 1 || r > std::min(X.rows(), X.cols()))
    throw std::invalid_argument("compound_matrix: order " + std::to_string(r) + " out of range");
  const auto rows = enumerate_tuples(static_cast<int>(X.rows()), r);
  const auto cols = enumerate_tuples(static_cast<int>(X.cols()), r);
  Eigen::MatrixXd C(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = minor(X, rows[i], cols[j]);
  return C;
}

bool is_pd(const Eigen::MatrixXd& X, double tol) {
  check_symmetric(X, "is_pd");
  const int n = static_cast<int>(X.rows());
  for (int j = 1; j <= n; ++j) {
    const Eigen::MatrixXd lead = X.topLeftCorner(j, j);
    if (!(determinant(lead) > tol * row_scale(lead))) return false;
  }
  return n > 0;
}

bool is_psd(const Eigen::MatrixXd& X, double tol) {
  check_symmetric(X, "is_psd");
  if (X.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(X, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  const double norm = ev.cwiseAbs().maxCoeff();
  return ev.minCoeff() >= -tol * norm;
}

std::optional<MinorReport> psd_violation(const Eigen::MatrixXd& X, double tol) {
  check_symmetric(X, "psd_violation");
  const int n = static_cast<int>(X.rows());
  for (int j = 1; j <= n; ++j) {
    if (binomial(n, j) > kMinorBudget) throw BudgetExceeded("psd_violation: too many principal minors");
    for (const auto& I : enumerate_tuples(n, j)) {
      const Eigen::MatrixXd M = submatrix(X, I, I);
      const double v = determinant(M);
      if (v < -tol * row_scale(M)) return MinorReport{j, I, I, v};
    }
  }
  return std::nullopt;
}

KPositivityResult is_k_positive(const Eigen::MatrixXd& X, int k, bool strict, bool consecutive_only, double tol) {
  const int m = static_cast<int>(X.rows()), n = static_cast<int>(X.cols());
  if (k < 1 || k > std::min(m, n))
    throw std::invalid_argument("is_k_positive: k must lie in 1..min(rows, cols)");
  KPositivityResult result;

  // Classifies one minor: -1 negative, 0 numerically zero, +1 positive.
  auto classify = [&](const IndexTuple& I, const IndexTuple& J, double& value) {
    const Eigen::MatrixXd M = submatrix(X, I, J);
    value = determinant(M);
    ++result.minors_checked;
    const double thr = tol * row_scale(M);
    if (value > thr) return 1;
    if (value < -thr) return -1;
    return 0;
  };

  if (!consecutive_only) {
    std::int64_t total = 0;
    for (int j = 1; j <= k; ++j) total += binomial(m, j) * binomial(n, j);
    if (total > kMinorBudget)
      throw BudgetExceeded("is_k_positive: " + std::to_string(total) + " minors exceed the exhaustive budget");
    for (int j = 1; j <= k; ++j) {
      const auto rows = enumerate_tuples(m, j);
      const auto cols = enumerate_tuples(n, j);
      for (const auto& I : rows)
        for (const auto& J : cols) {
          double v = 0.0;
          const int s = classify(I, J, v);
          if (s < 0 || (strict && s == 0)) {
            result.verdict = MatrixVerdict::Fails;
            result.witness = MinorReport{j, I, J, v};
            return result;
          }
        }
    }
    result.verdict = MatrixVerdict::Holds;
    return result;
  }

  bool lower_orders_positive = true;
  for (int j = 1; j <= k; ++j) {
    for (int a = 1; a + j - 1 <= m; ++a)
      for (int b = 1; b + j - 1 <= n; ++b) {
        const IndexTuple I = interval(m, a, j), J = interval(n, b, j);
        double v = 0.0;
        const int s = classify(I, J, v);
        if (s < 0 || (strict && s == 0)) {
          result.verdict = MatrixVerdict::Fails;
          result.witness = MinorReport{j, I, J, v};
          return result;
        }
        if (s == 0 && j < k) lower_orders_positive = false;
      }
  }
  result.verdict = lower_orders_positive ? MatrixVerdict::Holds : MatrixVerdict::Inconclusive;
  return result;
}

double desnanot_jacobi_residual(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  if (X.cols() != n || n < 3) throw std::invalid_argument("desnanot_jacobi_residual: need a square matrix, n >= 3");
  const double full = determinant(X);
  const double inner = determinant(X.block(1, 1, n - 2, n - 2));
  const double nw = determinant(X.topLeftCorner(n - 1, n - 1));
  const double se = determinant(X.bottomRightCorner(n - 1, n - 1));
  const double ne = determinant(X.topRightCorner(n - 1, n - 1));
  const double sw = determinant(X.bottomLeftCorner(n - 1, n - 1));
  return std::abs(full * inner - (nw * se - ne * sw));
}

int numerical_rank(const Eigen::MatrixXd& X, double tol) {
  if (X.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  return rank;
}

Eigen::VectorXd clean_output(const Eigen::MatrixXd& X, const Eigen::VectorXd& u, double zero_tol) {
  Eigen::VectorXd y = X * u;
  const Eigen::VectorXd mag = X.cwiseAbs() * u.cwiseAbs();
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (std::abs(y(i)) <= zero_tol * mag(i)) y(i) = 0.0;
  return y;
}

namespace {

std::optional<OvdViolation> check_input(const Eigen::MatrixXd& X, const Eigen::VectorXd& u, int k, int bound,
                                        const OvdOptions& opt) {
  const std::span<const double> us(u.data(), static_cast<std::size_t>(u.size()));
  const int su = variation(us, 0.0);
  if (su > k) return std::nullopt;
  const Eigen::VectorXd y = clean_output(X, u, opt.zero_tol);
  const std::span<const double> ys(y.data(), static_cast<std::size_t>(y.size()));
  const int sy = variation(ys, 0.0);
  const bool bound_broken = sy > std::min(bound, su);
  bool flip = false;
  if (!bound_broken && opt.require_order && sy == su) {
    const int a = first_nonzero_sign(us, 0.0), b = first_nonzero_sign(ys, 0.0);
    flip = a != 0 && b != 0 && a != b;
  }
  if (!bound_broken && !flip) return std::nullopt;
  return OvdViolation{u, y, su, sy, flip};
}

}  // namespace

OvdResult ovd_matrix_bruteforce(const Eigen::MatrixXd& X, int k, const OvdOptions& opt) {
  if (k < 0) throw std::invalid_argument("ovd_matrix_bruteforce: k must be >= 0");
  if (opt.alphabet.empty()) throw std::invalid_argument("ovd_matrix_bruteforce: empty alphabet");
  const int m = static_cast<int>(X.cols());
  OvdResult result;
  result.rank = numerical_rank(X, opt.rank_tol);
  const int bound = std::max(result.rank - 1, 0);

  const std::uint64_t base = opt.alphabet.size();
  std::uint64_t total = 1;
  for (int i = 0; i < m; ++i) {
    if (total > opt.budget / base + 1) throw BudgetExceeded("ovd_matrix_bruteforce: input lattice exceeds budget");
    total *= base;
  }
  if (total > opt.budget) throw BudgetExceeded("ovd_matrix_bruteforce: input lattice exceeds budget");

  auto input_at = [&](std::uint64_t idx) {
    Eigen::VectorXd u(m);
    for (int i = 0; i < m; ++i) {
      u(i) = opt.alphabet[idx % base];
      idx /= base;
    }
    return u;
  };

  unsigned workers = opt.threads > 0 ? static_cast<unsigned>(opt.threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(1, total / 4096))));
  std::atomic<std::uint64_t> first_bad{std::numeric_limits<std::uint64_t>::max()};
  auto scan = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      if (idx >= first_bad.load(std::memory_order_relaxed)) return;
      if (check_input(X, input_at(idx), k, bound, opt)) {
        std::uint64_t cur = first_bad.load();
        while (idx < cur && !first_bad.compare_exchange_weak(cur, idx)) {
        }
        return;
      }
    }
  };
  if (workers == 1) {
    scan(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = w * chunk, hi = std::min(total, lo + chunk);
      if (lo < hi) pool.emplace_back(scan, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  const std::uint64_t bad = first_bad.load();
  if (bad != std::numeric_limits<std::uint64_t>::max()) {
    result.passed = false;
    result.inputs_checked = bad + 1;
    result.counterexample = check_input(X, input_at(bad), k, bound, opt);
    return result;
  }
  result.inputs_checked = total;

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int s = 0; s < opt.random_samples; ++s) {
    Eigen::VectorXd u(m);
    for (int i = 0; i < m; ++i) u(i) = dist(rng);
    ++result.inputs_checked;
    if (auto v = check_input(X, u, k, bound, opt)) {
      result.passed = false;
      result.counterexample = std::move(v);
      return result;
    }
  }
  return result;
}

}  // namespace kpos
