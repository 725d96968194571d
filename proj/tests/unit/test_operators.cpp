#include <doctest.h>

#include <algorithm>

#include "ensemblekit/error.hpp"
#include "ensemblekit/operators.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ensemblekit;
using doctest::Approx;

TEST_SUITE("operators") {

TEST_CASE("term validation") {
  LatticeSpec lat(3, 1);
  CHECK_NOTHROW(validate_term({Region::single(lat, 0), 0.7 * pauli::x()}, 2, 1));
  CHECK(linalg::operator_norm_hermitian(0.7 * pauli::x()) == Approx(0.7));
  const linalg::Matrix zz = linalg::kron(pauli::z(), pauli::z());
  CHECK_NOTHROW(validate_term({Region(lat, {0, 1}), zz}, 2, 1));
  CHECK_THROWS_AS(validate_term({Region::single(lat, 0), 1.5 * pauli::z()}, 2, 1), NormViolation);
  CHECK_THROWS_AS(validate_term({Region(lat, {0, 2}), zz}, 2, 0), LocalityViolation);
  CHECK_THROWS_AS(validate_term({Region(lat, {0, 1}), pauli::z()}, 2, 1), PreconditionError);
  linalg::Matrix skew = pauli::x();
  skew(0, 1) = 0.5;
  CHECK_THROWS_AS(validate_term({Region::single(lat, 0), skew}, 2, 1), Error);
}

TEST_CASE("embedding follows the site ordering") {
  LatticeSpec lat(2, 1);
  const auto id = embed_term({Region::single(lat, 0), pauli::identity()}, lat, 2);
  CHECK((id - linalg::Matrix::Identity(4, 4)).norm() == 0.0);

  const auto z1 = embed_term({Region::single(lat, 0), pauli::z()}, lat, 2);
  const auto z2 = embed_term({Region::single(lat, 1), pauli::z()}, lat, 2);
  const double d1[] = {1, 1, -1, -1};
  const double d2[] = {1, -1, 1, -1};
  for (int i = 0; i < 4; ++i) {
    CHECK(z1(i, i).real() == d1[i]);
    CHECK(z2(i, i).real() == d2[i]);
  }
  CHECK((z1 - z1.diagonal().asDiagonal().toDenseMatrix()).norm() == 0.0);
}

TEST_CASE("embedding of a two-site term matches an explicit Kronecker product") {
  LatticeSpec lat(4, 1);
  const linalg::Matrix xy = linalg::kron(pauli::x(), pauli::y());
  const auto m = embed_term({Region(lat, {1, 3}), xy}, lat, 2);
  const oracle::Matrix expected = oracle::on_site(oracle::pauli_x(), 1, 4) * oracle::on_site(oracle::pauli_y(), 3, 4);
  CHECK((m - expected).norm() < 1e-14);
}

TEST_CASE("diagonalize small examples") {
  LatticeSpec one(1, 1);
  Hamiltonian h1(one, 2, 1, {{Region::single(one, 0), pauli::z()}});
  const auto s1 = diagonalize(h1);
  CHECK(s1.energies(0) == Approx(-1.0));
  CHECK(s1.energies(1) == Approx(1.0));

  const auto s3 = diagonalize(fixtures::field_chain(3));
  const double expected[] = {-3, -1, -1, -1, 1, 1, 1, 3};
  for (int i = 0; i < 8; ++i) CHECK(s3.energies(i) == Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("TFIM N=2 against an independent eigen-solve") {
  ModelSpec spec;
  spec.n = 2;
  const auto h = build_model(spec);
  const auto s = diagonalize(h);
  const auto ref = oracle::eigenvalues(oracle::tfim_chain(2));
  for (int i = 0; i < 4; ++i) CHECK(s.energies(i) == Approx(ref(i)).epsilon(1e-12));
}

TEST_CASE("reconstruction and trace for built-in models") {
  std::vector<ModelSpec> specs;
  ModelSpec tfim;
  tfim.n = 8;
  specs.push_back(tfim);
  ModelSpec heis;
  heis.family = "heisenberg";
  heis.n = 3;
  heis.d = 2;
  specs.push_back(heis);
  ModelSpec rnd;
  rnd.family = "random_klocal";
  rnd.n = 6;
  rnd.k = 2;
  rnd.seed = 11;
  specs.push_back(rnd);
  ModelSpec qutrit;
  qutrit.family = "random_klocal";
  qutrit.n = 4;
  qutrit.local_dim = 3;
  qutrit.seed = 2;
  specs.push_back(qutrit);
  for (const auto& spec : specs) {
    CAPTURE(spec.family);
    const auto h = build_model(spec);
    for (const auto& t : h.terms()) CHECK(linalg::operator_norm_hermitian(t.matrix) <= 1.0 + 1e-9);
    const auto s = diagonalize(h);
    const linalg::Matrix rebuilt = s.eigenvectors * s.energies.asDiagonal() * s.eigenvectors.adjoint();
    CHECK((rebuilt - h.dense()).norm() <= 1e-9 * std::max(1.0, h.dense().norm()));
    CHECK(std::abs(h.dense().trace().real() - s.energies.sum()) <= 1e-9 * std::max(1.0, s.energies.cwiseAbs().sum()));
    CHECK(std::is_sorted(s.energies.data(), s.energies.data() + s.energies.size()));
  }
}

TEST_CASE("random models are reproducible under a seed") {
  ModelSpec spec;
  spec.family = "random_klocal";
  spec.n = 5;
  spec.k = 2;
  spec.seed = 42;
  const auto a = build_model(spec).dense();
  const auto b = build_model(spec).dense();
  REQUIRE(a.size() == b.size());
  CHECK(std::equal(a.data(), a.data() + a.size(), b.data()));
  spec.seed = 43;
  CHECK((build_model(spec).dense() - a).norm() > 1e-6);
}

TEST_CASE("model spec json round trip and errors") {
  const auto j = nlohmann::json::parse(R"({"family":"tfim","n":6,"d":1,"params":{"J":2,"h":1}})");
  const auto spec = ModelSpec::from_json(j);
  CHECK(spec.n == 6);
  CHECK(ModelSpec::from_json(spec.to_json()).to_json() == spec.to_json());
  const auto h = build_model(spec);
  for (const auto& t : h.terms()) CHECK(linalg::operator_norm_hermitian(t.matrix) <= 1.0 + 1e-9);
  CHECK_THROWS_AS(ModelSpec::from_json(nlohmann::json::parse(R"({"family":"potts","n":2})")), ConfigError);
}

TEST_CASE("explicit terms are validated rather than rescaled") {
  ModelSpec spec;
  spec.family = "explicit";
  spec.n = 2;
  spec.params = nlohmann::json::parse(R"({"terms":[{"sites":[1],"re":[[2,0],[0,-2]]}]})");
  CHECK_THROWS_AS(build_model(spec), NormViolation);

  spec.params = nlohmann::json::parse(R"({"terms":[{"sites":[2,1],"re":[[1,0,0,0],[0,-1,0,0],[0,0,-1,0],[0,0,0,1]]}]})");
  CHECK_NOTHROW(build_model(spec));
  spec.params = nlohmann::json::parse(R"({"terms":[{"sites":[1,2],"re":[[1,0],[0,1]]}]})");
  CHECK_THROWS_AS(build_model(spec), ConfigError);
}

}
