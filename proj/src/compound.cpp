#include "kpos/compound.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kpos/error.hpp"
#include "kpos/totpos.hpp"

namespace kpos {

int xi(int j) {
  if (j < 1) throw std::invalid_argument("xi: j must be >= 1");
  return (j % 4 == 0 || j % 4 == 1) ? 1 : -1;
}

Signal compound_impulse(const Signal& g, int j, int horizon) {
  if (j < 1) throw std::invalid_argument("compound_impulse: j must be >= 1");
  if (horizon < 1) throw std::invalid_argument("compound_impulse: horizon must be >= 1");
  if (!g.covers(1, horizon + 2 * j - 2))
    throw std::out_of_range("compound_impulse: impulse response must cover 1.." +
                            std::to_string(horizon + 2 * j - 2));
  std::vector<double> out(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (int t = 1; t <= horizon; ++t) {
    const Eigen::MatrixXd H = hankel_matrix(g, t, j).entries;
    out[static_cast<std::size_t>(t)] = j == 1 ? H(0, 0) : Eigen::PartialPivLU<Eigen::MatrixXd>(H).determinant();
  }
  return Signal::from_values(std::move(out));
}

StateSpace compound_realization(const StateSpace& ss, int j) {
  const int n = ss.order();
  if (j < 1 || j > n) throw std::invalid_argument("compound_realization: j must lie in 1..n");
  if (j == 1) return ss;
  const Eigen::MatrixXd A = compound_matrix(ss.A(), j);
  const Eigen::MatrixXd B = compound_matrix(extended_controllability(ss, j), j);
  const Eigen::MatrixXd C = compound_matrix(extended_observability(ss, j), j);
  return StateSpace(A, B.col(0), C.row(0));
}

PartialFractionSystem compound_transfer(const PartialFractionSystem& pfs, int j) {
  if (j < 1) throw std::invalid_argument("compound_transfer: j must be >= 1");
  if (!pfs.fir().empty()) throw UnsupportedRepresentation("compound_transfer: FIR tail not supported");
  const int n = static_cast<int>(pfs.order());
  if (j == 1) return pfs;
  if (j > n) return PartialFractionSystem{};
  const auto& terms = pfs.terms();
  struct Acc {
    long double pole;
    long double residue;
  };
  std::vector<Acc> acc;
  for (const auto& v : enumerate_tuples(n, j)) {
    long double r = 1.0L, p = 1.0L;
    for (std::size_t a = 0; a < v.elements.size(); ++a) {
      const auto& ta = terms[static_cast<std::size_t>(v.elements[a] - 1)];
      r *= ta.residue;
      p *= ta.pole;
      for (std::size_t b = a + 1; b < v.elements.size(); ++b) {
        const long double gap =
            static_cast<long double>(ta.pole) - terms[static_cast<std::size_t>(v.elements[b] - 1)].pole;
        r *= gap * gap;
      }
    }
    acc.push_back({p, r});
  }
  std::stable_sort(acc.begin(), acc.end(), [](const Acc& a, const Acc& b) {
    return pole_order_less(Complex(static_cast<double>(a.pole), 0.0), Complex(static_cast<double>(b.pole), 0.0));
  });
  std::vector<PoleResidue> merged;
  long double run_r = 0.0L;
  double run_p = 0.0;
  bool open = false;
  for (const auto& a : acc) {
    const double p = static_cast<double>(a.pole);
    if (open && std::abs(p - run_p) <= 1e-12 * std::max({1.0, std::abs(p), std::abs(run_p)})) {
      run_r += a.residue;
      continue;
    }
    if (open) merged.push_back({static_cast<double>(run_r), run_p});
    run_p = p;
    run_r = a.residue;
    open = true;
  }
  if (open) merged.push_back({static_cast<double>(run_r), run_p});
  return PartialFractionSystem(std::move(merged));
}

double toeplitz_minor(const Signal& g, std::int64_t t, int j) {
  const Eigen::MatrixXd T = toeplitz_matrix(g, t, j).entries;
  return j == 1 ? T(0, 0) : Eigen::PartialPivLU<Eigen::MatrixXd>(T).determinant();
}

Signal toeplitz_compound_impulse(const Signal& g, int j, int horizon) {
  if (horizon < 0) throw std::invalid_argument("toeplitz_compound_impulse: horizon must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (int t = 0; t <= horizon; ++t) out[static_cast<std::size_t>(t)] = toeplitz_minor(g, t, j);
  return Signal::from_values(std::move(out));
}

Signal CompoundSystem::impulse(int horizon) const {
  if (!realization) return Signal::from_values(std::vector<double>(static_cast<std::size_t>(horizon) + 1, 0.0));
  return impulse_response(*realization, horizon);
}

CompoundSystem make_compound(const System& sys, int j) {
  if (j < 1) throw std::invalid_argument("make_compound: j must be >= 1");
  CompoundSystem out;
  out.j = j;
  out.source_order = system_order(sys);
  if (j > out.source_order) {
    out.pf_form = PartialFractionSystem{};
    return out;
  }
  out.realization = compound_realization(to_state_space(sys), j);
  if (auto pfs = try_partial_fractions(sys); pfs && pfs->fir().empty()) {
    if (static_cast<int>(pfs->order()) < j) out.pf_form = PartialFractionSystem{};
    else out.pf_form = compound_transfer(*pfs, j);
  }
  return out;
}

}  // namespace kpos
