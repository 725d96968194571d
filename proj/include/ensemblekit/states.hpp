#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "ensemblekit/lattice.hpp"
#include "ensemblekit/linalg.hpp"
#include "ensemblekit/operators.hpp"

namespace ensemblekit {

// Hermitian, positive semidefinite, unit-trace operator on a region.
//
// Construction symmetrizes the input, rejects trace errors above 1e-10 and
// eigenvalues below -1e-8, and clips eigenvalues in [-1e-8, 0) to zero
// before renormalizing.
class DensityMatrix {
 public:
  DensityMatrix(Region support, int local_dim, linalg::Matrix matrix);

  const Region& support() const noexcept { return support_; }
  int local_dim() const noexcept { return local_dim_; }
  const linalg::Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

 private:
  Region support_;
  int local_dim_;
  linalg::Matrix matrix_;
};

DensityMatrix maximally_mixed(const Region& support, int local_dim);
DensityMatrix pure_density(const Region& support, int local_dim, const linalg::Vector& psi);
// Ginibre-distributed mixed state; rank 0 means full rank.
DensityMatrix random_density(const Region& support, int local_dim, std::mt19937_64& rng,
                             std::size_t rank = 0);

DensityMatrix partial_trace(const DensityMatrix& rho, const Region& keep);

// Tensor product of states on pairwise disjoint regions, returned on the
// union in canonical site order.
DensityMatrix tensor_product(std::span<const DensityMatrix> factors);

// State of the whole lattice. Ensemble states are stored compactly in the
// energy eigenbasis (weights for mixtures of eigenprojectors, coefficients
// for pure states) so that reductions never build a D^N x D^N matrix.
class GlobalState {
 public:
  enum class Kind { Diagonal, Pure, Dense };

  static GlobalState diagonal(std::shared_ptr<const SpectralDecomposition> basis, linalg::RealVector weights);
  static GlobalState pure(std::shared_ptr<const SpectralDecomposition> basis, linalg::Vector coefficients);
  static GlobalState dense(DensityMatrix rho);

  Kind kind() const noexcept { return kind_; }
  const LatticeSpec& lattice() const noexcept;
  int local_dim() const noexcept;
  std::size_t dim() const noexcept;

  DensityMatrix reduced(const Region& keep) const;
  DensityMatrix to_dense() const;
  // <nu|rho|nu> in the eigenbasis of `spec`.
  linalg::RealVector populations(const SpectralDecomposition& spec) const;
  // tr(rho H) for the Hamiltonian diagonalized by `spec`.
  double energy(const SpectralDecomposition& spec) const;
  // von Neumann entropy in nats.
  double entropy() const;

  const linalg::RealVector& weights() const;
  const linalg::Vector& coefficients() const;
  const DensityMatrix& density() const;
  const std::shared_ptr<const SpectralDecomposition>& basis() const noexcept { return basis_; }

 private:
  GlobalState() = default;

  Kind kind_ = Kind::Dense;
  std::shared_ptr<const SpectralDecomposition> basis_;
  linalg::RealVector weights_;
  linalg::Vector coefficients_;
  std::shared_ptr<const DensityMatrix> dense_;
};

struct ThermalData {
  double T;
  double Z;        // may overflow to +inf; log_Z stays finite
  double log_Z;
  double u;        // energy per site
  double c;        // specific heat per site
  double s;        // entropy per site, nats
  double mean_energy;
  double energy_variance;
};

struct GibbsResult {
  GlobalState state;
  ThermalData thermal;
};

GibbsResult gibbs(std::shared_ptr<const SpectralDecomposition> spec, double T);

struct MicrocanonicalWindow {
  double e;
  double delta;
  double half_width;               // delta * sqrt(N)
  std::vector<std::size_t> members;
  std::size_t dim() const noexcept { return members.size(); }
};

// Throws EmptyWindow carrying the eigenvalue nearest to eN.
MicrocanonicalWindow window_members(const SpectralDecomposition& spec, double e, double delta);

struct MicrocanonicalResult {
  GlobalState state;
  MicrocanonicalWindow window;
};

MicrocanonicalResult microcanonical(std::shared_ptr<const SpectralDecomposition> spec, double e, double delta);

double restricted_partition(const SpectralDecomposition& spec, double T, double e, double delta);
double restricted_log_partition(const SpectralDecomposition& spec, double T, double e, double delta);

// Pure state drawn uniformly from span{|nu> : nu in window}.
GlobalState haar_state(const MicrocanonicalWindow& window,
                       std::shared_ptr<const SpectralDecomposition> spec, std::uint64_t seed);

}  // namespace ensemblekit
