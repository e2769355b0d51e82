#pragma once

#include <optional>

#include "kpos/lti.hpp"

namespace kpos {

/// Sign of the column-reversal permutation of size j: +1 iff j mod 4 is 0 or 1.
int xi(int j);

/// g_[j](t) = det H_g(t, j) for t = 1..horizon, with g_[j](0) = 0.
/// Throws std::out_of_range when g does not cover 1..horizon+2j-2.
Signal compound_impulse(const Signal& g, int j, int horizon);

/// (C_[j](A), C_[j](C_j), C_[j](O_j)); state dimension C(n, j).
/// Throws std::invalid_argument unless 1 <= j <= n.
StateSpace compound_realization(const StateSpace& ss, int j);

/// Hankel-indexed compound transfer function of a system with simple real
/// poles: sum over j-subsets v of prod r_v * prod_{a<b in v}(p_a - p_b)^2
/// at pole prod p_v. Terms with coinciding poles are merged. Returns the zero
/// system for j > n and the input for j = 1. Throws
/// UnsupportedRepresentation when the system has an FIR tail.
PartialFractionSystem compound_transfer(const PartialFractionSystem& pfs, int j);

/// det T_g(t, j) by LU with causal zero padding.
double toeplitz_minor(const Signal& g, std::int64_t t, int j);
/// det T_g(t, j) for t = 0..horizon.
Signal toeplitz_compound_impulse(const Signal& g, int j, int horizon);

struct CompoundSystem {
  int j = 1;
  int source_order = 0;
  /// Empty when j exceeds the source order (the compound system vanishes).
  std::optional<StateSpace> realization;
  /// Present when the source has simple real poles and no FIR tail.
  std::optional<PartialFractionSystem> pf_form;

  bool vanishes() const { return j > source_order; }
  /// g_[j](0..horizon) from the realization (zero when it vanishes).
  Signal impulse(int horizon) const;
};

CompoundSystem make_compound(const System& sys, int j);

}  // namespace kpos
