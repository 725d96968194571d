#include "ensemblekit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ensemblekit/error.hpp"

namespace ensemblekit {

using linalg::Complex;
using linalg::Matrix;

namespace pauli {
Matrix identity() { return Matrix::Identity(2, 2); }
Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

namespace {

constexpr double kNormSlack = 1e-9;
constexpr double kHermitianTol = 1e-12;

template <typename T>
T field_or(const nlohmann::json& j, const char* key, T fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + "." + key, "wrong type");
  }
}

// Sites reached from `i` along non-negative offsets within Manhattan radius k.
std::vector<std::size_t> forward_ball(const LatticeSpec& lat, std::size_t i, int k) {
  const Coord base = lat.coord(i);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < lat.num_sites(); ++j) {
    const Coord c = lat.coord(j);
    int dist = 0;
    bool forward = true;
    for (std::size_t a = 0; a < c.size(); ++a) {
      forward = forward && c[a] >= base[a];
      dist += c[a] - base[a];
    }
    if (forward && dist <= k) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> forward_neighbours(const LatticeSpec& lat, std::size_t i) {
  std::vector<std::size_t> out;
  Coord c = lat.coord(i);
  for (std::size_t a = 0; a < c.size(); ++a) {
    Coord nb = c;
    ++nb[a];
    if (lat.contains(nb)) out.push_back(lat.index(nb));
  }
  return out;
}

// Operator `op` on the site at `pos` of an m-site block, identity elsewhere.
Matrix on_position(const Matrix& op, std::size_t pos, std::size_t m) {
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t p = 0; p < m; ++p) out = linalg::kron(out, p == pos ? op : pauli::identity());
  return out;
}

std::vector<LocalTerm> tfim_terms(const LatticeSpec& lat, const nlohmann::json& params) {
  double J = field_or(params, "J", 1.0, "model.params");
  double h = field_or(params, "h", 1.0, "model.params");
  const double bound = lat.d() * std::abs(J) + std::abs(h);
  if (bound > 1.0) {
    J /= bound;
    h /= bound;
  }
  std::vector<LocalTerm> terms;
  for (std::size_t i = 0; i < lat.num_sites(); ++i) {
    std::vector<std::size_t> sites{i};
    for (std::size_t nb : forward_neighbours(lat, i)) sites.push_back(nb);
    Region support(lat, sites);
    const std::size_t m = support.size();
    Matrix op = h * on_position(pauli::x(), support.position_of(i), m);
    for (std::size_t nb : forward_neighbours(lat, i))
      op += J * on_position(pauli::z(), support.position_of(i), m) *
            on_position(pauli::z(), support.position_of(nb), m);
    terms.push_back({std::move(support), std::move(op)});
  }
  return terms;
}

std::vector<LocalTerm> heisenberg_terms(const LatticeSpec& lat, const nlohmann::json& params) {
  double J = field_or(params, "J", 1.0, "model.params");
  double h = field_or(params, "h", 0.0, "model.params");
  // sigma.sigma has spectrum {1, -3}
  const double bound = 3.0 * lat.d() * std::abs(J) + std::abs(h);
  if (bound > 1.0) {
    J /= bound;
    h /= bound;
  }
  std::vector<LocalTerm> terms;
  for (std::size_t i = 0; i < lat.num_sites(); ++i) {
    std::vector<std::size_t> sites{i};
    for (std::size_t nb : forward_neighbours(lat, i)) sites.push_back(nb);
    Region support(lat, sites);
    const std::size_t m = support.size();
    const std::size_t pi = support.position_of(i);
    Matrix op = h * on_position(pauli::z(), pi, m);
    for (std::size_t nb : forward_neighbours(lat, i)) {
      const std::size_t pn = support.position_of(nb);
      for (const Matrix& s : {pauli::x(), pauli::y(), pauli::z()})
        op += J * on_position(s, pi, m) * on_position(s, pn, m);
    }
    terms.push_back({std::move(support), std::move(op)});
  }
  return terms;
}

std::vector<LocalTerm> random_terms(const LatticeSpec& lat, int D, int k, std::uint64_t seed,
                                    const nlohmann::json& params) {
  if (k < 1 || k > 3) throw ConfigError("model.k", "random_klocal supports 1 <= k <= 3");
  const double strength = field_or(params, "strength", 1.0, "model.params");
  if (!(strength > 0.0) || strength > 1.0)
    throw ConfigError("model.params.strength", "must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<LocalTerm> terms;
  for (std::size_t i = 0; i < lat.num_sites(); ++i) {
    Region support(lat, forward_ball(lat, i, k));
    const auto dim = static_cast<Eigen::Index>(linalg::int_pow(static_cast<std::size_t>(D), support.size()));
    Matrix g(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
      for (Eigen::Index r = 0; r < dim; ++r) {
        const double re = normal(rng);
        const double im = normal(rng);
        g(r, c) = Complex(re, im);
      }
    Matrix op = linalg::hermitian_part(g);
    op *= strength / linalg::operator_norm_hermitian(op);
    terms.push_back({std::move(support), std::move(op)});
  }
  return terms;
}

Matrix parse_matrix(const nlohmann::json& term, const std::string& path, Eigen::Index dim) {
  if (!term.contains("re")) throw ConfigError(path + ".re", "missing");
  const auto& re = term.at("re");
  const nlohmann::json im = term.contains("im") ? term.at("im") : nlohmann::json();
  if (!re.is_array() || static_cast<Eigen::Index>(re.size()) != dim)
    throw ConfigError(path + ".re", "expected " + std::to_string(dim) + " rows");
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const auto& row = re.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
      throw ConfigError(path + ".re", "expected " + std::to_string(dim) + " columns");
    for (Eigen::Index c = 0; c < dim; ++c) {
      double imag = 0.0;
      if (!im.is_null()) imag = im.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
      m(r, c) = Complex(row.at(static_cast<std::size_t>(c)).get<double>(), imag);
    }
  }
  return m;
}

std::vector<LocalTerm> explicit_terms(const LatticeSpec& lat, int D, const nlohmann::json& params) {
  if (!params.contains("terms") || !params.at("terms").is_array())
    throw ConfigError("model.params.terms", "explicit family needs a list of terms");
  std::vector<LocalTerm> terms;
  std::size_t t = 0;
  for (const auto& term : params.at("terms")) {
    const std::string path = "model.params.terms[" + std::to_string(t++) + "]";
    if (!term.contains("sites") || !term.at("sites").is_array() || term.at("sites").empty())
      throw ConfigError(path + ".sites", "missing or empty");
    std::vector<std::size_t> listed;
    for (const auto& s : term.at("sites")) {
      if (s.is_number_integer()) {
        const auto v = s.get<long long>();
        if (v < 1 || static_cast<std::size_t>(v) > lat.num_sites())
          throw ConfigError(path + ".sites", "site number out of range");
        listed.push_back(static_cast<std::size_t>(v - 1));
      } else if (s.is_array()) {
        const Coord c = s.get<Coord>();
        if (!lat.contains(c)) throw ConfigError(path + ".sites", "coordinate outside the lattice");
        listed.push_back(lat.index(c));
      } else {
        throw ConfigError(path + ".sites", "entries must be site numbers or coordinates");
      }
    }
    Region support(lat, listed);
    if (support.size() != listed.size()) throw ConfigError(path + ".sites", "duplicate sites");
    const auto dim = static_cast<Eigen::Index>(linalg::int_pow(static_cast<std::size_t>(D), listed.size()));
    Matrix m = parse_matrix(term, path, dim);
    // Reorder factors from the listed order into canonical order.
    std::vector<std::size_t> perm;
    for (std::size_t site : support.sites())
      perm.push_back(static_cast<std::size_t>(std::find(listed.begin(), listed.end(), site) - listed.begin()));
    m = linalg::reduce(m, D, listed.size(), perm);
    terms.push_back({std::move(support), std::move(m)});
  }
  return terms;
}

}  // namespace

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("model", "must be an object");
  ModelSpec s;
  s.family = field_or<std::string>(j, "family", s.family, "model");
  s.n = field_or(j, "n", s.n, "model");
  s.d = field_or(j, "d", s.d, "model");
  s.local_dim = field_or(j, "local_dim", s.local_dim, "model");
  s.k = field_or(j, "k", s.k, "model");
  s.seed = field_or<std::uint64_t>(j, "seed", s.seed, "model");
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("model.params", "must be an object");
    s.params = j.at("params");
  }
  if (s.family != "tfim" && s.family != "heisenberg" && s.family != "random_klocal" && s.family != "explicit")
    throw ConfigError("model.family", "unknown family '" + s.family + "'");
  if (s.n < 1) throw ConfigError("model.n", "must be positive");
  if (s.d < 1) throw ConfigError("model.d", "must be positive");
  if (s.local_dim < 2) throw ConfigError("model.local_dim", "must be at least 2");
  if (s.k < 1) throw ConfigError("model.k", "must be positive");
  if ((s.family == "tfim" || s.family == "heisenberg") && s.local_dim != 2)
    throw ConfigError("model.local_dim", s.family + " requires local_dim = 2");
  return s;
}

nlohmann::json ModelSpec::to_json() const {
  return {{"family", family}, {"n", n}, {"d", d}, {"local_dim", local_dim},
          {"k", k}, {"params", params}, {"seed", seed}};
}

void validate_term(const LocalTerm& term, int local_dim, int locality) {
  const auto dim = static_cast<Eigen::Index>(linalg::int_pow(static_cast<std::size_t>(local_dim), term.support.size()));
  if (term.matrix.rows() != dim || term.matrix.cols() != dim)
    throw PreconditionError("local term matrix has the wrong dimension for its support");
  const double scale = std::max(1.0, term.matrix.cwiseAbs().maxCoeff());
  if (!linalg::is_hermitian(term.matrix, kHermitianTol * scale))
    throw PreconditionError("local term is not Hermitian");
  const double norm = linalg::operator_norm_hermitian(term.matrix);
  if (norm > 1.0 + kNormSlack) {
    std::ostringstream os;
    os << "local term has operator norm " << norm << " > 1";
    throw NormViolation(os.str());
  }
  const int radius = term.support.radius();
  if (radius > locality) {
    std::ostringstream os;
    os << "local term support has radius " << radius << " > k=" << locality;
    throw LocalityViolation(os.str());
  }
}

Matrix embed_term(const LocalTerm& term, const LatticeSpec& lattice, int local_dim) {
  if (!(term.support.lattice() == lattice)) throw PreconditionError("term support outside the lattice");
  const std::size_t N = lattice.num_sites();
  const auto dim = static_cast<Eigen::Index>(linalg::int_pow(static_cast<std::size_t>(local_dim), N));
  Matrix out = Matrix::Zero(dim, dim);
  const auto sites = term.support.sites();
  const auto table = linalg::split_index_table(local_dim, N, sites);
  const auto local = static_cast<std::size_t>(term.matrix.rows());
  const std::size_t rest = table.size() / local;
  for (std::size_t a = 0; a < local; ++a)
    for (std::size_t b = 0; b < local; ++b) {
      const Complex v = term.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (v == Complex(0.0)) continue;
      for (std::size_t r = 0; r < rest; ++r) out(table[a * rest + r], table[b * rest + r]) += v;
    }
  return out;
}

Hamiltonian::Hamiltonian(LatticeSpec lattice, int local_dim, int locality, std::vector<LocalTerm> terms)
    : lattice_(std::move(lattice)), local_dim_(local_dim), locality_(locality), terms_(std::move(terms)) {
  if (local_dim_ < 2) throw PreconditionError("local dimension must be at least 2");
  const auto dim = static_cast<Eigen::Index>(linalg::int_pow(static_cast<std::size_t>(local_dim_), lattice_.num_sites()));
  dense_ = Matrix::Zero(dim, dim);
  for (const auto& t : terms_) {
    validate_term(t, local_dim_, locality_);
    dense_ += embed_term(t, lattice_, local_dim_);
  }
}

Hamiltonian build_model(const ModelSpec& spec) {
  LatticeSpec lat(spec.n, spec.d);
  std::vector<LocalTerm> terms;
  if (spec.family == "tfim") {
    terms = tfim_terms(lat, spec.params);
  } else if (spec.family == "heisenberg") {
    terms = heisenberg_terms(lat, spec.params);
  } else if (spec.family == "random_klocal") {
    terms = random_terms(lat, spec.local_dim, spec.k, spec.seed, spec.params);
  } else if (spec.family == "explicit") {
    terms = explicit_terms(lat, spec.local_dim, spec.params);
  } else {
    throw ConfigError("model.family", "unknown family '" + spec.family + "'");
  }
  return Hamiltonian(lat, spec.local_dim, spec.k, std::move(terms));
}

SpectralDecomposition diagonalize(const Hamiltonian& h) {
  auto eig = linalg::eigh(h.dense());
  return {h.lattice(), h.local_dim(), std::move(eig.values), std::move(eig.vectors)};
}

}  // namespace ensemblekit
