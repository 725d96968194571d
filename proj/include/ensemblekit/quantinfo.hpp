#pragma once

#include "ensemblekit/linalg.hpp"
#include "ensemblekit/operators.hpp"
#include "ensemblekit/states.hpp"

namespace ensemblekit {

enum class Unit { Nats, Bits };

const char* unit_name(Unit u);

// Divergence with an explicit unit; value may be +infinity.
struct DivergenceValue {
  double value;
  Unit unit;

  bool finite() const noexcept;
  DivergenceValue in(Unit target) const;
  double bits() const { return in(Unit::Bits).value; }
  double nats() const { return in(Unit::Nats).value; }
};

inline constexpr double kSupportThreshold = 1e-10;

// tr|rho - sigma|, in [0, 2].
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

// -sum lambda ln lambda over the clipped spectrum (nats).
double von_neumann_entropy(const DensityMatrix& rho);

// tr(tau ln tau) - tr(tau ln rho); +inf unless supp(tau) is inside supp(rho).
DivergenceValue relative_entropy(const DensityMatrix& tau, const DensityMatrix& rho, Unit unit = Unit::Bits,
                                 double support_threshold = kSupportThreshold);

// log2 lambda_max(rho^{-1/2} tau rho^{-1/2}) on supp(rho), in bits.
DivergenceValue max_relative_entropy(const DensityMatrix& tau, const DensityMatrix& rho,
                                     double support_threshold = kSupportThreshold);

// F_T(tau) = tr(H tau) - T S(tau), S in nats.
double free_energy(const DensityMatrix& tau, const linalg::Matrix& hamiltonian, double T);
double free_energy(const GlobalState& tau, const SpectralDecomposition& spec, double T);

namespace detail {
// Raw-matrix versions used where no region bookkeeping is needed.
double relative_entropy_nats(const linalg::Matrix& tau, const linalg::Matrix& rho, double support_threshold);
double max_relative_entropy_bits(const linalg::Matrix& tau, const linalg::Matrix& rho, double support_threshold);
}  // namespace detail

}  // namespace ensemblekit
