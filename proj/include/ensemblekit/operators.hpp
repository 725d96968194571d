#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensemblekit/lattice.hpp"
#include "ensemblekit/linalg.hpp"

namespace ensemblekit {

// Hermitian operator acting on `support`, factors in the region's canonical
// order. The operator norm must not exceed 1.
struct LocalTerm {
  Region support;
  linalg::Matrix matrix;
};

// {"family": "tfim"|"heisenberg"|"random_klocal"|"explicit", "n", "d",
//  "local_dim", "k", "params": {...}, "seed"}
struct ModelSpec {
  std::string family = "tfim";
  int n = 4;
  int d = 1;
  int local_dim = 2;
  int k = 1;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;

  static ModelSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

class Hamiltonian {
 public:
  // Validates every term (Hermiticity, norm, locality) and assembles the
  // dense matrix.
  Hamiltonian(LatticeSpec lattice, int local_dim, int locality, std::vector<LocalTerm> terms);

  const LatticeSpec& lattice() const noexcept { return lattice_; }
  int local_dim() const noexcept { return local_dim_; }
  int locality() const noexcept { return locality_; }
  const std::vector<LocalTerm>& terms() const noexcept { return terms_; }
  const linalg::Matrix& dense() const noexcept { return dense_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(dense_.rows()); }

 private:
  LatticeSpec lattice_;
  int local_dim_;
  int locality_;
  std::vector<LocalTerm> terms_;
  linalg::Matrix dense_;
};

struct SpectralDecomposition {
  LatticeSpec lattice;
  int local_dim;
  linalg::RealVector energies;   // ascending
  linalg::Matrix eigenvectors;   // columns |nu>

  std::size_t dim() const noexcept { return static_cast<std::size_t>(energies.size()); }
  std::size_t num_sites() const noexcept { return lattice.num_sites(); }
};

namespace pauli {
linalg::Matrix identity();
linalg::Matrix x();
linalg::Matrix y();
linalg::Matrix z();
}  // namespace pauli

// Throws NormViolation / LocalityViolation / PreconditionError.
void validate_term(const LocalTerm& term, int local_dim, int locality);

linalg::Matrix embed_term(const LocalTerm& term, const LatticeSpec& lattice, int local_dim);

Hamiltonian build_model(const ModelSpec& spec);

SpectralDecomposition diagonalize(const Hamiltonian& h);

}  // namespace ensemblekit
