#pragma once

#include <memory>
#include <random>
#include <vector>

#include "ensemblekit/lattice.hpp"
#include "ensemblekit/operators.hpp"
#include "ensemblekit/states.hpp"

namespace fixtures {

using namespace ensemblekit;

inline LatticeSpec chain(int n) { return LatticeSpec(n, 1); }

inline Region sites(const LatticeSpec& lat, std::vector<std::size_t> s) { return Region(lat, std::move(s)); }

inline DensityMatrix whole(const LatticeSpec& lat, const linalg::Matrix& m, int local_dim = 2) {
  return DensityMatrix(Region::whole(lat), local_dim, m);
}

inline DensityMatrix random_qubits(int n, std::mt19937_64& rng) {
  const auto lat = chain(n);
  return random_density(Region::whole(lat), 2, rng);
}

// H = sum_i sigma_z^(i) on an open chain.
inline Hamiltonian field_chain(int n) {
  const auto lat = chain(n);
  std::vector<LocalTerm> terms;
  for (int i = 0; i < n; ++i) terms.push_back({Region::single(lat, i), pauli::z()});
  return Hamiltonian(lat, 2, 1, std::move(terms));
}

inline std::shared_ptr<const SpectralDecomposition> field_spectrum(int n) {
  return std::make_shared<const SpectralDecomposition>(diagonalize(field_chain(n)));
}

inline std::shared_ptr<const SpectralDecomposition> tfim_spectrum(int n) {
  ModelSpec spec;
  spec.family = "tfim";
  spec.n = n;
  spec.d = 1;
  return std::make_shared<const SpectralDecomposition>(diagonalize(build_model(spec)));
}

}  // namespace fixtures
