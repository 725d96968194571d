#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Open hypercubic lattice {1..n}^d with the Manhattan metric.
//
// Sites are numbered 0..N-1 lexicographically, first coordinate most
// significant. Every tensor-factor ordering in the library follows this
// numbering.
namespace ensemblekit {

using Coord = std::vector<int>;  // 1-based coordinates

class LatticeSpec {
 public:
  LatticeSpec(int n, int d);

  int n() const noexcept { return n_; }
  int d() const noexcept { return d_; }
  std::size_t num_sites() const noexcept { return num_sites_; }

  bool contains(const Coord& c) const;
  std::size_t index(const Coord& c) const;
  Coord coord(std::size_t site) const;
  int manhattan(std::size_t a, std::size_t b) const;

  bool operator==(const LatticeSpec&) const = default;

 private:
  int n_;
  int d_;
  std::size_t num_sites_;
};

// Nonempty set of distinct sites of one lattice, stored in canonical order.
class Region {
 public:
  Region(const LatticeSpec& lattice, std::vector<std::size_t> sites);

  static Region from_coords(const LatticeSpec& lattice, const std::vector<Coord>& coords);
  static Region single(const LatticeSpec& lattice, std::size_t site);
  static Region whole(const LatticeSpec& lattice);

  const LatticeSpec& lattice() const noexcept { return lattice_; }
  std::span<const std::size_t> sites() const noexcept { return sites_; }
  std::size_t size() const noexcept { return sites_.size(); }

  bool contains(std::size_t site) const;
  bool is_subset_of(const Region& other) const;
  bool overlaps(const Region& other) const;
  // Position of `site` inside this region's canonical ordering.
  std::size_t position_of(std::size_t site) const;

  Region unite(const Region& other) const;

  // Smallest r such that some member site reaches every other member within
  // Manhattan distance r.
  int radius() const;
  int diameter() const;

  bool operator==(const Region& other) const = default;

 private:
  LatticeSpec lattice_;
  std::vector<std::size_t> sites_;
};

int distance(const Region& x, const Region& y);

struct CubeFamily {
  LatticeSpec lattice;
  int l;
  std::vector<Coord> corners;  // Λ_l, canonical order
  std::vector<Region> cubes;   // cubes[i] = corners[i] + {0..l-1}^d
};

CubeFamily hypercubes(const LatticeSpec& lattice, int l);

struct GroupDecomposition {
  int l;
  int r;
  int m;
  std::vector<Coord> keys;                      // {1..l+r}^d, canonical order
  std::vector<std::vector<std::size_t>> groups; // cube indices per key
};

// Splits the cube family into groups whose members are pairwise more than r
// sites apart.
GroupDecomposition group_decomposition(const CubeFamily& family, int r);

}  // namespace ensemblekit
