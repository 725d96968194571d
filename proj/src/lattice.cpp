#include "ensemblekit/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

#include "ensemblekit/error.hpp"

namespace ensemblekit {

namespace {

// Enumerates {lo..hi}^d in canonical order.
std::vector<Coord> box(int d, int lo, int hi) {
  std::vector<Coord> out;
  if (hi < lo) return out;
  Coord c(static_cast<std::size_t>(d), lo);
  while (true) {
    out.push_back(c);
    int axis = d - 1;
    while (axis >= 0 && c[static_cast<std::size_t>(axis)] == hi) {
      c[static_cast<std::size_t>(axis)] = lo;
      --axis;
    }
    if (axis < 0) break;
    ++c[static_cast<std::size_t>(axis)];
  }
  return out;
}

}  // namespace

LatticeSpec::LatticeSpec(int n, int d) : n_(n), d_(d), num_sites_(1) {
  if (n < 1 || d < 1) throw PreconditionError("lattice requires n >= 1 and d >= 1");
  for (int i = 0; i < d; ++i) {
    if (num_sites_ > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(n))
      throw PreconditionError("lattice too large");
    num_sites_ *= static_cast<std::size_t>(n);
  }
}

bool LatticeSpec::contains(const Coord& c) const {
  if (c.size() != static_cast<std::size_t>(d_)) return false;
  return std::all_of(c.begin(), c.end(), [this](int x) { return x >= 1 && x <= n_; });
}

std::size_t LatticeSpec::index(const Coord& c) const {
  if (!contains(c)) throw PreconditionError("coordinate outside the lattice");
  std::size_t idx = 0;
  for (int x : c) idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(x - 1);
  return idx;
}

Coord LatticeSpec::coord(std::size_t site) const {
  if (site >= num_sites_) throw PreconditionError("site index outside the lattice");
  Coord c(static_cast<std::size_t>(d_));
  for (int axis = d_ - 1; axis >= 0; --axis) {
    c[static_cast<std::size_t>(axis)] = static_cast<int>(site % static_cast<std::size_t>(n_)) + 1;
    site /= static_cast<std::size_t>(n_);
  }
  return c;
}

int LatticeSpec::manhattan(std::size_t a, std::size_t b) const {
  const Coord ca = coord(a), cb = coord(b);
  int dist = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) dist += std::abs(ca[i] - cb[i]);
  return dist;
}

Region::Region(const LatticeSpec& lattice, std::vector<std::size_t> sites)
    : lattice_(lattice), sites_(std::move(sites)) {
  if (sites_.empty()) throw PreconditionError("region must be nonempty");
  std::sort(sites_.begin(), sites_.end());
  if (std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end())
    throw PreconditionError("region contains duplicate sites");
  if (sites_.back() >= lattice_.num_sites()) throw PreconditionError("region site outside the lattice");
}

Region Region::from_coords(const LatticeSpec& lattice, const std::vector<Coord>& coords) {
  std::vector<std::size_t> sites;
  sites.reserve(coords.size());
  for (const auto& c : coords) sites.push_back(lattice.index(c));
  return Region(lattice, std::move(sites));
}

Region Region::single(const LatticeSpec& lattice, std::size_t site) { return Region(lattice, {site}); }

Region Region::whole(const LatticeSpec& lattice) {
  std::vector<std::size_t> sites(lattice.num_sites());
  for (std::size_t i = 0; i < sites.size(); ++i) sites[i] = i;
  return Region(lattice, std::move(sites));
}

bool Region::contains(std::size_t site) const {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

bool Region::is_subset_of(const Region& other) const {
  return lattice_ == other.lattice_ &&
         std::includes(other.sites_.begin(), other.sites_.end(), sites_.begin(), sites_.end());
}

bool Region::overlaps(const Region& other) const {
  return std::any_of(sites_.begin(), sites_.end(), [&](std::size_t s) { return other.contains(s); });
}

std::size_t Region::position_of(std::size_t site) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), site);
  if (it == sites_.end() || *it != site) throw PreconditionError("site not in region");
  return static_cast<std::size_t>(it - sites_.begin());
}

Region Region::unite(const Region& other) const {
  if (!(lattice_ == other.lattice_)) throw PreconditionError("regions belong to different lattices");
  std::vector<std::size_t> merged;
  std::set_union(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(),
                 std::back_inserter(merged));
  return Region(lattice_, std::move(merged));
}

int Region::radius() const {
  int best = std::numeric_limits<int>::max();
  for (std::size_t a : sites_) {
    int ecc = 0;
    for (std::size_t b : sites_) ecc = std::max(ecc, lattice_.manhattan(a, b));
    best = std::min(best, ecc);
  }
  return best;
}

int Region::diameter() const {
  int diam = 0;
  for (std::size_t a : sites_)
    for (std::size_t b : sites_) diam = std::max(diam, lattice_.manhattan(a, b));
  return diam;
}

int distance(const Region& x, const Region& y) {
  if (!(x.lattice() == y.lattice())) throw PreconditionError("distance: regions belong to different lattices");
  int best = std::numeric_limits<int>::max();
  for (std::size_t a : x.sites())
    for (std::size_t b : y.sites()) best = std::min(best, x.lattice().manhattan(a, b));
  return best;
}

CubeFamily hypercubes(const LatticeSpec& lattice, int l) {
  const int n = lattice.n();
  if (l < 1 || 2 * l > n + 1)
    throw PreconditionError("hypercubes: edge length l=" + std::to_string(l) +
                            " outside 1 <= l <= (n+1)/2 for n=" + std::to_string(n));
  CubeFamily fam{lattice, l, box(lattice.d(), 1, n - l + 1), {}};
  const auto offsets = box(lattice.d(), 0, l - 1);
  fam.cubes.reserve(fam.corners.size());
  for (const auto& corner : fam.corners) {
    std::vector<Coord> members;
    members.reserve(offsets.size());
    for (const auto& off : offsets) {
      Coord c = corner;
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += off[i];
      members.push_back(std::move(c));
    }
    fam.cubes.push_back(Region::from_coords(lattice, members));
  }
  return fam;
}

GroupDecomposition group_decomposition(const CubeFamily& family, int r) {
  if (r < 0) throw PreconditionError("group_decomposition: r must be non-negative");
  const int n = family.lattice.n();
  const int l = family.l;
  const int span = n - l + 1;
  const int stride = l + r;
  GroupDecomposition out{l, r, (span + stride - 1) / stride, box(family.lattice.d(), 1, stride), {}};

  // Corner coordinate -> cube index, corners live in {1..span}^d.
  auto corner_index = [&](const Coord& c) {
    std::size_t idx = 0;
    for (int x : c) idx = idx * static_cast<std::size_t>(span) + static_cast<std::size_t>(x - 1);
    return idx;
  };
  const auto steps = box(family.lattice.d(), 0, out.m - 1);
  out.groups.reserve(out.keys.size());
  for (const auto& key : out.keys) {
    std::vector<std::size_t> members;
    for (const auto& j : steps) {
      Coord c = key;
      bool inside = true;
      for (std::size_t a = 0; a < c.size(); ++a) {
        c[a] += stride * j[a];
        inside = inside && c[a] <= span;
      }
      if (inside) members.push_back(corner_index(c));
    }
    out.groups.push_back(std::move(members));
  }
  return out;
}

}  // namespace ensemblekit
