#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace kpos {

/// Strictly increasing 1-based index set {v_1 < ... < v_r} inside {1..n}.
struct IndexTuple {
  int n = 0;
  std::vector<int> elements;

  int r() const { return static_cast<int>(elements.size()); }
  /// Consecutive indices (v_{i+1} = v_i + 1).
  bool is_interval() const;
  bool operator==(const IndexTuple&) const = default;
};

/// All r-subsets of {1..n} in lexicographic order; empty when r > n.
/// Throws std::invalid_argument for r < 1 or n < 1.
std::vector<IndexTuple> enumerate_tuples(int n, int r);

/// det(X_{I,J}) via LU with partial pivoting.
double minor(const Eigen::MatrixXd& X, const IndexTuple& I, const IndexTuple& J);
/// Product of the row sup-norms of X_{I,J}; the reference scale for zero tests.
double minor_scale(const Eigen::MatrixXd& X, const IndexTuple& I, const IndexTuple& J);
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& X, const IndexTuple& I, const IndexTuple& J);

/// r-th multiplicative compound: entry (i, j) is the minor on the i-th row
/// tuple and j-th column tuple, both enumerated lexicographically.
Eigen::MatrixXd compound_matrix(const Eigen::MatrixXd& X, int r);

struct MinorReport {
  int order = 0;
  IndexTuple rows;
  IndexTuple cols;
  double value = 0.0;
};

inline constexpr double kMinorTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

/// Sylvester: every leading principal minor exceeds tol times its scale.
/// Throws std::invalid_argument for asymmetric input.
bool is_pd(const Eigen::MatrixXd& X, double tol = kMinorTol);
/// Smallest eigenvalue >= -tol * max|eigenvalue|.
bool is_psd(const Eigen::MatrixXd& X, double tol = kPsdTol);
/// A negative principal minor of a matrix that is not PSD (smallest order first).
std::optional<MinorReport> psd_violation(const Eigen::MatrixXd& X, double tol = kMinorTol);

enum class MatrixVerdict { Holds, Fails, Inconclusive };

struct KPositivityResult {
  MatrixVerdict verdict = MatrixVerdict::Inconclusive;
  std::optional<MinorReport> witness;
  std::int64_t minors_checked = 0;
};

inline constexpr std::int64_t kMinorBudget = 1'000'000;

/// k-positivity of X. Exhaustive mode scans every j-minor for j <= k and
/// throws BudgetExceeded above kMinorBudget evaluations. Consecutive mode
/// scans interval-indexed minors only: it refutes on a negative (or, when
/// strict, zero) minor, certifies when the consecutive minors of order < k are
/// positive and those of order k are nonnegative (all positive when strict),
/// and is inconclusive otherwise.
KPositivityResult is_k_positive(const Eigen::MatrixXd& X, int k, bool strict = false, bool consecutive_only = false,
                                double tol = kMinorTol);

/// |det X det X° - (det NW det SE - det NE det SW)| where X° drops the first
/// and last row and column and the corner blocks drop one row and column.
/// Throws std::invalid_argument for non-square X or n < 3.
double desnanot_jacobi_residual(const Eigen::MatrixXd& X);

/// Number of singular values above tol * sigma_max.
int numerical_rank(const Eigen::MatrixXd& X, double tol = 1e-10);

struct OvdOptions {
  std::vector<double> alphabet{-1.0, 0.0, 1.0};
  bool require_order = true;
  /// Extra inputs drawn uniformly from [-1, 1]^m.
  int random_samples = 0;
  std::uint64_t seed = 0x5EED;
  std::uint64_t budget = std::uint64_t{1} << 24;
  double rank_tol = 1e-10;
  double zero_tol = 1e-12;
  int threads = 0;  ///< 0 picks std::thread::hardware_concurrency()
};

struct OvdViolation {
  Eigen::VectorXd input;
  Eigen::VectorXd output;
  int input_variation = 0;
  int output_variation = 0;
  bool order_flip = false;  ///< variation bound held but the leading signs differ
};

struct OvdResult {
  bool passed = true;
  int rank = 0;
  std::uint64_t inputs_checked = 0;
  std::optional<OvdViolation> counterexample;
};

/// Brute-force check of order-preserving k-variation diminishing for the map
/// u -> X u over alphabet^m (first coordinate varies fastest), followed by the
/// optional random inputs. The first counterexample in enumeration order is
/// reported regardless of how the work is split across threads.
OvdResult ovd_matrix_bruteforce(const Eigen::MatrixXd& X, int k, const OvdOptions& options = {});

/// Sign bookkeeping shared with the operator-level checks. Entries of y with
/// |y_i| <= zero_tol * sum_b |X_ib u_b| count as zero.
Eigen::VectorXd clean_output(const Eigen::MatrixXd& X, const Eigen::VectorXd& u, double zero_tol);

}  // namespace kpos
