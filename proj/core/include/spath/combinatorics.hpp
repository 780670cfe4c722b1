#ifndef SPATH_COMBINATORICS_HPP
#define SPATH_COMBINATORICS_HPP

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spath/numerics.hpp"

namespace spath {

using BigInt = boost::multiprecision::cpp_int;

/// Monotone integer lattice path (0, S_1, ..., S_{n-1}, n) with S_j <= j
/// and nondecreasing coordinates. Increment m_j = S_j - S_{j-1}.
struct SPath {
  std::vector<int> coords;

  int n() const { return int(coords.size()) - 1; }
  int increment(int j) const { return coords[j] - coords[j - 1]; }
  bool operator==(const SPath& other) const = default;
};

/// Set partition of {1..n}; cells are sorted ascending and ordered by
/// their maximal element.
struct Partition {
  std::vector<std::vector<int>> cells;

  int n() const;
  bool operator==(const Partition& other) const = default;
};

/// Checks the three path constraints; throws ConstraintError naming the
/// first failing index.
SPath validate_path(const std::vector<int>& coords);

/// Checks that `cells` partitions {1..n}; returns the canonical form.
Partition validate_partition(std::vector<std::vector<int>> cells, int n);

/// All valid paths with n+1 coordinates, lexicographic on the coordinate
/// vector. Count equals the n-th Catalan number.
std::vector<SPath> enumerate_paths(int n, int cap = 15);

/// All partitions of {1..n} (Bell(n) of them), in restricted-growth-string
/// order.
std::vector<Partition> enumerate_partitions(int n, int cap = 10);

BigInt count_paths(int n);       // Catalan(n), exact
BigInt count_partitions(int n);  // Bell(n), exact

BigInt binomial(int a, int b);  // exact binom(a, b), 0 outside the triangle

/// Path corresponding to a partition: increments are cell sizes placed at
/// the cells' maximal elements.
SPath path_of_partition(const Partition& p);

/// Number of partitions corresponding to `path`:
/// prod over increments of binom(j-1-S_{j-1}, j-S_j).
BigInt fiber_size(const SPath& path);

/// Uniform draw from the partitions corresponding to `path`.
///
/// Scans j = 1..n; at each positive increment the new cell with maximal
/// element j picks its m_j - 1 remaining members uniformly without
/// replacement from the indices below j not yet assigned, whose count is
/// exactly j-1-S_{j-1}. The stepwise choice counts multiply to fiber_size.
Partition sample_partition_given_path(const SPath& path, Rng& rng);

}  // namespace spath

#endif
