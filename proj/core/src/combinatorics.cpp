#include "spath/combinatorics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace spath {

int Partition::n() const {
  int total = 0;
  for (const auto& cell : cells) total += int(cell.size());
  return total;
}

SPath validate_path(const std::vector<int>& coords) {
  if (coords.size() < 2) {
    throw ConstraintError("path needs at least 2 coordinates", 0);
  }
  const int n = int(coords.size()) - 1;
  if (coords[0] != 0) throw ConstraintError("S_0 must be 0", 0);
  if (coords[n] != n) {
    throw ConstraintError("S_n must equal n (got " + std::to_string(coords[n]) + ")", n);
  }
  for (int j = 1; j < n; ++j) {
    if (coords[j] > j) {
      throw ConstraintError(
          "S_" + std::to_string(j) + " = " + std::to_string(coords[j]) +
              " exceeds its location " + std::to_string(j),
          j);
    }
  }
  for (int j = 0; j < n; ++j) {
    if (coords[j] > coords[j + 1]) {
      throw ConstraintError("coordinates decrease at index " + std::to_string(j + 1), j + 1);
    }
  }
  if (coords[0] < 0) throw ConstraintError("negative coordinate", 0);
  return SPath{coords};
}

Partition validate_partition(std::vector<std::vector<int>> cells, int n) {
  std::vector<char> seen(size_t(n) + 1, 0);
  int total = 0;
  for (auto& cell : cells) {
    if (cell.empty()) throw ConstraintError("empty cell", 0);
    std::sort(cell.begin(), cell.end());
    for (int i : cell) {
      if (i < 1 || i > n) throw ConstraintError("index out of range: " + std::to_string(i), i);
      if (seen[size_t(i)]) throw ConstraintError("duplicate index: " + std::to_string(i), i);
      seen[size_t(i)] = 1;
      ++total;
    }
  }
  if (total != n) throw ConstraintError("cells do not cover {1..n}", 0);
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.back() < b.back(); });
  return Partition{std::move(cells)};
}

std::vector<SPath> enumerate_paths(int n, int cap) {
  if (n < 1) throw ConstraintError("n must be positive", 0);
  if (n > cap) {
    throw NumericError("enumerate_paths: n = " + std::to_string(n) +
                       " exceeds cap " + std::to_string(cap));
  }
  std::vector<SPath> out;
  std::vector<int> coords(size_t(n) + 1, 0);
  coords[size_t(n)] = n;
  // depth-first with ascending branch values gives lexicographic order
  auto rec = [&](auto&& self, int j) -> void {
    if (j == n) {
      out.push_back(SPath{coords});
      return;
    }
    for (int v = coords[size_t(j) - 1]; v <= j; ++v) {
      coords[size_t(j)] = v;
      self(self, j + 1);
    }
  };
  rec(rec, 1);
  return out;
}

std::vector<Partition> enumerate_partitions(int n, int cap) {
  if (n < 1) throw ConstraintError("n must be positive", 0);
  if (n > cap) {
    throw NumericError("enumerate_partitions: n = " + std::to_string(n) +
                       " exceeds cap " + std::to_string(cap));
  }
  std::vector<Partition> out;
  std::vector<int> label(size_t(n), 0);  // restricted growth string
  auto emit = [&] {
    int blocks = 1 + *std::max_element(label.begin(), label.end());
    std::vector<std::vector<int>> cells(static_cast<std::size_t>(blocks));
    for (int i = 0; i < n; ++i) cells[size_t(label[size_t(i)])].push_back(i + 1);
    out.push_back(validate_partition(std::move(cells), n));
  };
  auto rec = [&](auto&& self, int i, int maxLabel) -> void {
    if (i == n) {
      emit();
      return;
    }
    for (int v = 0; v <= maxLabel + 1; ++v) {
      label[size_t(i)] = v;
      self(self, i + 1, std::max(maxLabel, v));
    }
  };
  rec(rec, 0, -1);
  return out;
}

BigInt binomial(int a, int b) {
  if (b < 0 || b > a) return 0;
  b = std::min(b, a - b);
  BigInt r = 1;
  for (int k = 1; k <= b; ++k) {
    r *= a - b + k;
    r /= k;  // exact: r is binom(a-b+k, k) after each step
  }
  return r;
}

BigInt count_paths(int n) {
  if (n < 1) throw ConstraintError("n must be positive", 0);
  return binomial(2 * n, n) / (n + 1);
}

BigInt count_partitions(int n) {
  if (n < 1) throw ConstraintError("n must be positive", 0);
  // Bell triangle
  std::vector<BigInt> row{1};
  for (int k = 1; k < n; ++k) {
    std::vector<BigInt> next;
    next.reserve(row.size() + 1);
    next.push_back(row.back());
    for (const BigInt& x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.back();
}

SPath path_of_partition(const Partition& p) {
  const int n = p.n();
  std::vector<int> increments(size_t(n) + 1, 0);
  for (const auto& cell : p.cells) increments[size_t(cell.back())] = int(cell.size());
  std::vector<int> coords(size_t(n) + 1, 0);
  for (int j = 1; j <= n; ++j) coords[size_t(j)] = coords[size_t(j) - 1] + increments[size_t(j)];
  return validate_path(coords);
}

BigInt fiber_size(const SPath& path) {
  const int n = path.n();
  BigInt total = 1;
  for (int j = 1; j <= n; ++j) {
    if (path.increment(j) > 0) {
      total *= binomial(j - 1 - path.coords[size_t(j) - 1], j - path.coords[size_t(j)]);
    }
  }
  return total;
}

Partition sample_partition_given_path(const SPath& path, Rng& rng) {
  const int n = path.n();
  std::vector<std::vector<int>> cells;
  std::vector<int> pool;  // unassigned indices below the scan position
  pool.reserve(size_t(n));
  for (int j = 1; j <= n; ++j) {
    const int m = path.increment(j);
    if (m == 0) {
      pool.push_back(j);
      continue;
    }
    std::vector<int> cell{j};
    for (int k = 0; k < m - 1; ++k) {
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      const std::size_t at = pick(rng);
      cell.push_back(pool[at]);
      pool[at] = pool.back();
      pool.pop_back();
    }
    cells.push_back(std::move(cell));
  }
  return validate_partition(std::move(cells), n);
}

}  // namespace spath
