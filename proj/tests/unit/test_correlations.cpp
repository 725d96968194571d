#include <doctest.h>

#include <cmath>
#include <random>

#include "ensemblekit/correlations.hpp"
#include "ensemblekit/error.hpp"
#include "ensemblekit/experiment.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ensemblekit;
using doctest::Approx;

namespace {

// max over unit Bloch vectors n, m of |tr((n.sigma x m.sigma) Delta)|, by a
// grid over n with the optimal m in closed form. Identity components of P
// and Q contribute nothing because both marginals of Delta vanish.
double qubit_pair_oracle(const oracle::Matrix& delta) {
  const oracle::Matrix paulis[] = {oracle::pauli_x(), oracle::pauli_y(), oracle::pauli_z()};
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = (oracle::kron(paulis[i], paulis[j]) * delta).trace().real();
  double best = 0.0;
  const int steps = 600;
  for (int a = 0; a <= steps; ++a) {
    const double theta = M_PI * a / steps;
    for (int b = 0; b < 2 * steps; ++b) {
      const double phi = M_PI * b / steps;
      const Eigen::Vector3d n(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
      best = std::max(best, (t.transpose() * n).norm());
    }
  }
  return best;
}

oracle::Matrix connected_part(const oracle::Matrix& rho) {
  const auto a = oracle::partial_trace(rho, 2, 2, {0});
  const auto b = oracle::partial_trace(rho, 2, 2, {1});
  return rho - oracle::kron(a, b);
}

}  // namespace

TEST_SUITE("correlations") {

TEST_CASE("product states are uncorrelated") {
  std::mt19937_64 rng(1);
  const auto lat = fixtures::chain(3);
  const auto a = random_density(Region::single(lat, 0), 2, rng);
  const auto b = random_density(Region::single(lat, 2), 2, rng);
  const DensityMatrix parts[] = {a, b};
  const auto est = correlation(tensor_product(parts), Region::single(lat, 0), Region::single(lat, 2));
  CHECK(est.lower == Approx(0.0).scale(1.0));
  CHECK(est.upper == Approx(0.0).scale(1.0));
}

TEST_CASE("Bell pair matches the exhaustive Pauli oracle") {
  const auto lat = fixtures::chain(2);
  linalg::Vector bell = linalg::Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const auto rho = pure_density(Region::whole(lat), 2, bell);
  const auto est = correlation(rho, Region::single(lat, 0), Region::single(lat, 1));
  const double ref = qubit_pair_oracle(connected_part(rho.matrix()));
  CHECK(ref == Approx(1.0).epsilon(1e-3));
  CHECK(est.lower == Approx(ref).epsilon(1e-3));
  CHECK(est.upper >= est.lower - 1e-12);
  CHECK(est.delta_trace_norm == Approx(1.5).epsilon(1e-12));
}

TEST_CASE("random two-qubit states: witnesses are attained and bracket the oracle") {
  std::mt19937_64 rng(9);
  const auto lat = fixtures::chain(2);
  const Region x = Region::single(lat, 0), y = Region::single(lat, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = fixtures::random_qubits(2, rng);
    const auto est = correlation(rho, x, y);
    const auto delta = connected_part(rho.matrix());
    const double ref = qubit_pair_oracle(delta);
    // The grid oracle undershoots the true maximum by at most ~1e-5 relative.
    CHECK(est.lower <= ref * (1.0 + 5e-5));
    CHECK(est.lower == Approx(ref).epsilon(1e-3));
    CHECK(est.upper >= ref - 1e-9);
    CHECK(est.upper <= est.delta_trace_norm + 1e-12);
    CHECK(linalg::operator_norm_hermitian(est.p) <= 1.0 + 1e-9);
    CHECK(linalg::operator_norm_hermitian(est.q) <= 1.0 + 1e-9);
    const double attained = std::abs((oracle::kron(est.p, est.q) * delta).trace().real());
    CHECK(attained == Approx(est.lower).epsilon(1e-9));
  }
}

TEST_CASE("overlapping regions are rejected") {
  std::mt19937_64 rng(2);
  const auto lat = fixtures::chain(2);
  const auto rho = fixtures::random_qubits(2, rng);
  CHECK_THROWS_AS(correlation(rho, Region::single(lat, 0), Region::single(lat, 0)), PreconditionError);
  CHECK_THROWS_AS(correlation(rho, Region::whole(lat), Region::single(lat, 1)), PreconditionError);
}

TEST_CASE("TFIM Gibbs correlations decay with distance") {
  const auto spec = fixtures::tfim_spectrum(8);
  const auto rho = gibbs(spec, 2.0).state;
  const auto lat = spec->lattice;
  double previous = 2.0;
  for (std::size_t d = 1; d <= 6; ++d) {
    const auto est = correlation(rho, Region::single(lat, 1), Region::single(lat, 1 + d));
    CAPTURE(d);
    CHECK(est.upper <= previous + 1e-12);
    CHECK(est.lower <= est.upper + 1e-12);
    previous = est.upper;
  }
}

TEST_CASE("global-state and dense correlations agree") {
  const auto spec = fixtures::tfim_spectrum(5);
  const auto g = gibbs(spec, 1.0).state;
  const auto lat = spec->lattice;
  const Region x(lat, {0, 1}), y = Region::single(lat, 4);
  const auto a = correlation(g, x, y);
  const auto b = correlation(g.to_dense(), x, y);
  CHECK(a.upper == Approx(b.upper).epsilon(1e-9));
  CHECK(a.lower == Approx(b.lower).epsilon(1e-6));
}

TEST_CASE("profile fits on synthetic data") {
  std::vector<CorrelationSample> s1, s2;
  for (int d = 1; d <= 6; ++d) {
    s1.push_back({d, std::exp(-d / 2.0)});
    s2.push_back({d, 8.0 * std::exp(-static_cast<double>(d))});
  }
  const auto p1 = fit_profile(s1, 8);
  CHECK(p1.xi == Approx(2.0).epsilon(1e-6));
  CHECK(p1.z == Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(p1.envelope_ok);
  const auto p2 = fit_profile(s2, 8);
  CHECK(p2.xi == Approx(1.0).epsilon(1e-6));
  CHECK(p2.z == Approx(1.0).epsilon(1e-6));
  CHECK(p2.envelope_ok);
  CHECK(envelope_dominates(p2, s2));
}

TEST_CASE("profile certificate covers noisy samples") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> jitter(0.5, 2.0);
  std::vector<CorrelationSample> s;
  for (int d = 1; d <= 8; ++d)
    for (int rep = 0; rep < 3; ++rep) s.push_back({d, 0.3 * std::exp(-d / 1.5) * jitter(rng)});
  const auto p = fit_profile(s, 10);
  CHECK(p.envelope_ok);
  CHECK(envelope_dominates(p, s));
  for (const auto& x : s) CHECK(x.value <= p.envelope(x.distance) + 1e-9);
}

TEST_CASE("all-zero samples") {
  const auto p = fit_profile({{1, 0.0}, {2, 0.0}}, 4);
  CHECK(p.all_zero);
  CHECK(p.envelope_ok);
}

TEST_CASE("TFIM T=5 N=10 profile certifies its own samples") {
  const auto spec = fixtures::tfim_spectrum(10);
  const auto rho = gibbs(spec, 5.0).state;
  const auto samples = sample_site_pairs(rho, {1, 2, 3}, {});
  const auto p = fit_profile(samples, 10);
  CHECK(p.envelope_ok);
  CHECK(envelope_dominates(p, samples));
}

}
