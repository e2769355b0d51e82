#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "kpos/polynomial.hpp"
#include "kpos/signals.hpp"

namespace kpos {

inline constexpr int kDefaultHorizon = 64;

struct PoleResidue {
  double residue = 0.0;
  double pole = 0.0;
};

/// G(z) = sum_i r_i / (z - p_i) + sum_l d_l z^-l with simple real poles.
///
/// Terms are kept sorted by descending |p|, ties by descending p. Zero
/// residues are dropped on construction; a system with no terms and no FIR
/// samples is the zero system. The FIR tail stores d_1, d_2, ... (the sample
/// added at t = 1 comes first).
class PartialFractionSystem {
 public:
  PartialFractionSystem() = default;
  /// Throws UnsupportedRepresentation for repeated poles and
  /// std::invalid_argument for non-finite data.
  explicit PartialFractionSystem(std::vector<PoleResidue> terms, std::vector<double> fir = {});

  static PartialFractionSystem from_lists(std::span<const double> residues, std::span<const double> poles,
                                          std::vector<double> fir = {});

  const std::vector<PoleResidue>& terms() const { return terms_; }
  const std::vector<double>& fir() const { return fir_; }
  std::size_t order() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty() && fir_.empty(); }

  std::vector<double> poles() const;
  std::vector<double> residues() const;

  PartialFractionSystem scaled(double factor) const;

 private:
  std::vector<PoleResidue> terms_;
  std::vector<double> fir_;
};

/// Strictly proper G(z) = gain * prod(z - z_i) / prod(z - p_i).
///
/// The denominator is stored monic. Roots are sorted with sort_pole_order.
class RationalTransferFunction {
 public:
  /// Coefficients in descending powers. Throws StructuralError for a zero
  /// numerator, an improper ratio or coinciding poles and zeros.
  static RationalTransferFunction from_coefficients(Poly numerator, Poly denominator);
  static RationalTransferFunction from_roots(double gain, std::vector<Complex> zeros, std::vector<Complex> poles);

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  double gain() const { return num_.front(); }
  const std::vector<Complex>& zeros() const { return zeros_; }
  const std::vector<Complex>& poles() const { return poles_; }
  int order() const { return static_cast<int>(den_.size()) - 1; }

 private:
  RationalTransferFunction() = default;
  void validate() const;

  Poly num_;
  Poly den_;
  std::vector<Complex> zeros_;
  std::vector<Complex> poles_;
};

/// x(t+1) = A x(t) + b u(t), y(t) = c x(t).
class StateSpace {
 public:
  StateSpace(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::RowVectorXd c);

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::RowVectorXd& c() const { return c_; }
  int order() const { return static_cast<int>(A_.rows()); }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::RowVectorXd c_;
};

using System = std::variant<PartialFractionSystem, RationalTransferFunction, StateSpace>;

// ---- impulse responses ----------------------------------------------------

/// Samples g(0), ..., g(horizon); g(0) = 0 for every strictly proper system.
Signal impulse_response(const PartialFractionSystem& sys, int horizon);
Signal impulse_response(const RationalTransferFunction& sys, int horizon);
Signal impulse_response(const StateSpace& sys, int horizon);
Signal impulse_response(const System& sys, int horizon);

// ---- conversions ------------------------------------------------------------

/// Residues r_i = N(p_i) / prod_{j != i}(p_i - p_j). Throws
/// UnsupportedRepresentation for repeated or complex poles.
PartialFractionSystem partial_fractions(const RationalTransferFunction& rtf);
/// Common-denominator form of a partial-fraction system.
RationalTransferFunction recombine(const PartialFractionSystem& pfs);

enum class Splitting {
  Asymmetric,  ///< b_i = r_i, c_i = 1
  Symmetric,   ///< b_i = c_i = sqrt(r_i); needs every r_i >= 0
};

/// Diagonal realization; the FIR tail becomes a nilpotent shift chain.
StateSpace to_state_space(const PartialFractionSystem& pfs, Splitting splitting = Splitting::Asymmetric);
/// Controllable canonical form.
StateSpace to_state_space(const RationalTransferFunction& rtf);
StateSpace to_state_space(const System& sys);

/// Transfer function of a realization. Throws StructuralError when the
/// realization is not minimal (a pole cancels against a zero).
RationalTransferFunction to_rational(const StateSpace& ss);
RationalTransferFunction to_rational(const System& sys);

/// The partial-fraction view of `sys` when all poles are simple and real.
std::optional<PartialFractionSystem> try_partial_fractions(const System& sys);

/// Modal expansion sum_i r_i / (z - p_i) with complex data; empty optional
/// when some pole is repeated. Modes with negligible residue are dropped.
struct ModalForm {
  std::vector<Complex> residues;
  std::vector<Complex> poles;
  std::vector<double> fir;
};
std::optional<ModalForm> modal_form(const System& sys);

/// McMillan degree of the representation (state dimension for StateSpace).
int system_order(const System& sys);
/// Poles sorted by the pole ordering.
std::vector<Complex> poles(const System& sys);

/// Numerator roots. Throws StructuralError for a degenerate numerator.
std::vector<Complex> zeros(const RationalTransferFunction& rtf);

// ---- structured matrices ---------------------------------------------------

/// C_j = [b, Ab, ..., A^(j-1) b], size n x j.
Eigen::MatrixXd extended_controllability(const StateSpace& ss, int j);
/// O_j = [c; cA; ...; cA^(j-1)], size j x n.
Eigen::MatrixXd extended_observability(const StateSpace& ss, int j);

enum class MatrixKind { Hankel, Toeplitz };

struct StructuredMatrixView {
  MatrixKind kind = MatrixKind::Hankel;
  std::int64_t t = 1;
  int order = 1;
  Eigen::MatrixXd entries;
};

/// H_g(t, j) with entry (a, b) = g(t + a + b - 2), 1-based. Needs t >= 1 and
/// g covering t .. t + 2j - 2 (std::out_of_range otherwise).
StructuredMatrixView hankel_matrix(const Signal& g, std::int64_t t, int j);
/// T_g(t, j) with entry (a, b) = g(t + a - b), zero for negative times.
StructuredMatrixView toeplitz_matrix(const Signal& g, std::int64_t t, int j);

}  // namespace kpos
