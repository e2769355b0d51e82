#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kpos/lti.hpp"
#include "kpos/totpos.hpp"

namespace kpos {

enum class Property { External, HankelK, ToeplitzK, HankelTotal, ToeplitzTotal, Relaxation };

/// Ordered from strongest to weakest; merge() keeps the weaker of two.
enum class Verdict { Certified, HoldsToHorizon, Unsupported, Refuted };

Verdict merge(Verdict a, Verdict b);
const char* to_string(Property p);
const char* to_string(Verdict v);

struct Witness {
  /// sample, residue, pole, zero, hankel_minor, toeplitz_minor, psd, compound, repeated_pole, hypothesis
  std::string kind;
  std::string detail;
  double value = 0.0;
  std::optional<std::int64_t> time;
  std::optional<int> index;  ///< 1-based term / pole / compound order
  std::optional<Complex> location;
  std::optional<MinorReport> minor;
};

struct Certificate {
  /// tail_dominance, finite_impulse, zero_system, sign_pattern, minor_set, compound_chain
  std::string kind;
  std::string detail;
  std::optional<std::int64_t> tail_start;  ///< T*: the bound holds for every t >= T*
};

struct PositivityReport {
  Property property = Property::External;
  int k = 1;
  Verdict verdict = Verdict::HoldsToHorizon;
  int horizon = 0;
  std::optional<std::int64_t> t0;
  std::optional<Certificate> certificate;
  std::optional<Witness> witness;
  std::vector<std::string> notes;
  /// Sub-checks in evaluation order (compound orders, matrix tests).
  std::vector<PositivityReport> parts;
  std::string label;
};

/// Structured text serialization: "key: value" lines with nested
/// "name { ... }" blocks. Deterministic for identical reports.
std::string to_text(const PositivityReport& report);

// ---- external positivity ----------------------------------------------------

/// Sample scan over 1..horizon, then the necessary conditions on the dominant
/// mode (real, positive, positive residue, no real zero at or beyond it), then
/// the tail-dominance certificate r1 p1^(t-1) > sum_{i>=2} |r_i| |p_i|^(t-1).
PositivityReport check_external(const System& sys, int horizon = kDefaultHorizon);

// ---- Hankel / Toeplitz k-positivity -----------------------------------------

/// H_g(1,k-1) positive definite, H_g(2,k-1) positive semidefinite and G_[k]
/// externally positive. k above the system order is answered by
/// check_hankel_total.
PositivityReport check_hankel_k(const System& sys, int k, int horizon = kDefaultHorizon);

/// xi(j) G_[j] externally positive for j <= k and det T_g(t, j) > 0 for
/// t0 <= t <= j-1, j <= k-1. Unsupported when the (k-1)-th pole is zero.
PositivityReport check_toeplitz_k(const System& sys, int k, int horizon = kDefaultHorizon);

/// All residues and poles nonnegative (parallel first-order lags).
PositivityReport check_hankel_total(const System& sys);
/// Positive gain, real nonnegative poles, real nonpositive zeros.
PositivityReport check_toeplitz_total(const System& sys);

enum class OperatorKind { Hankel, Toeplitz };
const char* to_string(OperatorKind kind);

struct CoefficientCheck {
  bool passed = true;
  std::optional<int> offending_index;  ///< 1-based
  std::string reason;
};

/// Hankel: r_i > 0 and p_i >= 0 for i <= min(k, n). Toeplitz: (-1)^(i+1) r_i > 0
/// and p_i >= 0 for i <= min(k, n).
CoefficientCheck necessary_coefficients(const PartialFractionSystem& pfs, int k, OperatorKind kind);

struct RelaxationResult {
  bool nonnegative_coefficients = false;  ///< all r_i, p_i >= 0
  bool hankel_definite = false;           ///< H_g(1,n) > 0 and H_g(2,n) >= 0
  bool alternating_differences = false;   ///< (-1)^j Delta^j g >= 0 for j <= J
  bool agree() const {
    return nonnegative_coefficients == hankel_definite && hankel_definite == alternating_differences;
  }
};

RelaxationResult check_relaxation(const PartialFractionSystem& pfs, int J = 6, int horizon = 40);

// ---- decompositions ---------------------------------------------------------

enum class DecompositionMode { HankelAdditive, ToeplitzMultiplicative };

struct Decomposition {
  DecompositionMode mode = DecompositionMode::HankelAdditive;
  int k = 1;
  /// Hankel: the first min(k, n) partial-fraction terms.
  PartialFractionSystem dominant;
  /// Toeplitz: pole of the first-order factor z / (z - p1).
  double factor_pole = 0.0;
  /// Hankel: remaining terms; Toeplitz: G(z)(z - p1)/z. Empty for the zero remainder.
  std::optional<System> remainder;
  bool dominant_total = false;    ///< dominant part is Hankel totally positive
  bool recursive_claim = false;   ///< peeled tails keep the lower-order property
  bool zeros_below_pole = false;  ///< Toeplitz: real zeros of G below p_min(k, n)
  std::vector<std::string> notes;
};

/// Additive split G = sum_{i<=k} r_i/(z - p_i) + G_r. Throws StructuralError
/// when check_hankel_k(pfs, k) is Refuted.
Decomposition hankel_decompose(const PartialFractionSystem& pfs, int k, int horizon = kDefaultHorizon);
/// Multiplicative split G = z/(z - p1) G_r. Throws StructuralError when the
/// precondition is Refuted, p1 is not real, or G has no zero at the origin.
Decomposition toeplitz_decompose(const RationalTransferFunction& rtf, int k, int horizon = kDefaultHorizon);
/// Impulse response of the recombined decomposition over 0..horizon.
Signal recombined_impulse(const Decomposition& d, int horizon);

// ---- structural checks --------------------------------------------------------

struct PoleCluster {
  Complex value;
  int multiplicity = 1;
};

struct RepeatedPoleResult {
  bool passed = true;
  std::vector<PoleCluster> clusters;  ///< in pole order
  std::string reason;
};

/// The k-1 dominant eigenvalues of A are simple and p_{k-1} > 0; at k >= n
/// every eigenvalue must be simple.
RepeatedPoleResult repeated_pole_check(const StateSpace& ss, int k);

/// g_d = -Delta g: terms r_i (1 - p_i) at p_i plus the FIR differences, and
/// the sample -g(1) at t = 0 kept as a separate feedthrough.
struct DiffSystem {
  PartialFractionSystem system;
  double feedthrough = 0.0;
};
DiffSystem diff_system(const PartialFractionSystem& pfs);
Signal impulse_response(const DiffSystem& d, int horizon);

}  // namespace kpos
