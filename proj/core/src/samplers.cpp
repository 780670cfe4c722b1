#include "spath/samplers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <thread>

#include "spath/errors.hpp"

namespace spath {

const char* sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::accelerated_path: return "ap";
    case SamplerKind::gibbs_path: return "gp";
    case SamplerKind::gwcr: return "gwcr";
  }
  return "?";
}

namespace {

int next_increment_location(const SPath& path, int r) {
  const int n = path.n();
  for (int l = r + 1; l <= n; ++l) {
    if (path.increment(l) > 0) return l;
  }
  throw NumericError("ap step: no increment beyond r (invalid path)");
}

}  // namespace

ApProposal ap_candidate_weights(const PosteriorModel& model, const SPath& path, int r) {
  ApProposal prop;
  prop.r = r;
  prop.q = next_increment_location(path, r);
  const int a = path.coords[std::size_t(r) - 1];
  const int b = path.coords[std::size_t(prop.q)];
  prop.j_min = a;
  prop.j_max = std::min(r, b - 1);
  prop.log_w.resize(std::size_t(prop.j_max - prop.j_min) + 1);
  for (int j = prop.j_min; j <= prop.j_max; ++j) {
    prop.log_w[std::size_t(j - prop.j_min)] =
        model.log_phi_term(r, a, j) + model.log_phi_term(prop.q, j, b);
  }
  return prop;
}

ApProposal ap_candidate_weights_explicit(const PosteriorModel& model, const SPath& path, int r) {
  ApProposal prop;
  prop.r = r;
  prop.q = next_increment_location(path, r);
  const int a = path.coords[std::size_t(r) - 1];
  const int b = path.coords[std::size_t(prop.q)];
  prop.j_min = a;
  prop.j_max = std::min(r, b - 1);
  prop.log_w.resize(std::size_t(prop.j_max - prop.j_min) + 1);
  for (int j = prop.j_min; j <= prop.j_max; ++j) {
    double w;
    if (j == a) {
      w = std::log(double(r - a)) - std::log(double(b - 1 - a)) +
          model.log_xi_at_time(b - a, prop.q);
    } else {
      w = model.log_choose_cached(b - a - 2, b - j - 1);
      for (int i = r + 1; i <= prop.q - 1; ++i) {
        w += std::log(double(i - j)) - std::log(double(i - a));
      }
      w += model.log_xi_at_time(j - a, r) + model.log_xi_at_time(b - j, prop.q);
    }
    prop.log_w[std::size_t(j - prop.j_min)] = w;
  }
  return prop;
}

GibbsProposal gibbs_candidate_weights(const PosteriorModel& model, const SPath& path, int r) {
  GibbsProposal prop;
  prop.r = r;
  const int a = path.coords[std::size_t(r) - 1];
  const int next = path.coords[std::size_t(r) + 1];
  prop.j_min = a;
  prop.j_max = std::min(r, next);
  prop.log_w.resize(std::size_t(prop.j_max - prop.j_min) + 1);
  for (int j = prop.j_min; j <= prop.j_max; ++j) {
    prop.log_w[std::size_t(j - prop.j_min)] =
        model.log_phi_term(r, a, j) + model.log_phi_term(r + 1, j, next);
  }
  return prop;
}

void ap_step(ChainState& state, int r, const PosteriorModel& model) {
  const ApProposal prop = ap_candidate_weights(model, state.path, r);
  int j = prop.j_min;
  if (prop.j_max > prop.j_min) {
    j = prop.j_min + sample_from_log_weights(prop.log_w, state.rng);
  }
  for (int l = r; l < prop.q; ++l) state.path.coords[std::size_t(l)] = j;
}

void gibbs_path_step(ChainState& state, int r, const PosteriorModel& model) {
  const GibbsProposal prop = gibbs_candidate_weights(model, state.path, r);
  int j = prop.j_min;
  if (prop.j_max > prop.j_min) {
    j = prop.j_min + sample_from_log_weights(prop.log_w, state.rng);
  }
  state.path.coords[std::size_t(r)] = j;
}

std::vector<double> gwcr_candidate_log_weights(const std::vector<std::vector<int>>& cells,
                                               int item, const PosteriorModel& model) {
  std::vector<double> log_w(cells.size() + 1);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const int cell_max = cells[c].back();
    const int e = int(cells[c].size());
    log_w[c] = model.log_xi_at_time(e + 1, std::max(cell_max, item)) -
               model.log_xi_at_time(e, cell_max);
  }
  log_w.back() = model.log_xi_at_time(1, item);
  return log_w;
}

void gwcr_reseat_step(PartitionChainState& state, int item, const PosteriorModel& model) {
  // remove the item
  for (std::size_t c = 0; c < state.cells.size(); ++c) {
    auto& cell = state.cells[c];
    auto it = std::lower_bound(cell.begin(), cell.end(), item);
    if (it != cell.end() && *it == item) {
      cell.erase(it);
      if (cell.empty()) state.cells.erase(state.cells.begin() + long(c));
      break;
    }
  }
  const auto log_w = gwcr_candidate_log_weights(state.cells, item, model);
  const int pick = sample_from_log_weights(log_w, state.rng);
  if (pick == int(state.cells.size())) {
    state.cells.push_back({item});
  } else {
    auto& cell = state.cells[std::size_t(pick)];
    cell.insert(std::upper_bound(cell.begin(), cell.end(), item), item);
  }
}

namespace {

// per-chain cache of log xi_i over the evaluation grid
class GridXiCache {
 public:
  GridXiCache(const PosteriorModel& model, std::span<const double> grid)
      : model_(model), grid_(grid.begin(), grid.end()), rows_(std::size_t(model.max_xi_order()) + 1) {
    split_.resize(std::size_t(model.n()) + 1, 0);
    for (int j = 1; j <= model.n(); ++j) {
      split_[std::size_t(j)] = int(
          std::upper_bound(grid_.begin(), grid_.end(), model.complete_time(j)) - grid_.begin());
    }
  }

  /// acc += lambda for the block (time index j, size m), over the grid
  void accumulate_block(int j, int m, std::span<double> acc) {
    const double den = model_.log_xi_at_time(m, j);
    if (den == kNegInf) return;
    const int split = split_[std::size_t(j)];
    const double head = std::exp(model_.log_xi_at_time(m + 1, j) - den);
    for (int gi = 0; gi < split; ++gi) acc[std::size_t(gi)] += head;
    const auto& row = row_for(m + 1);
    for (std::size_t gi = std::size_t(split); gi < grid_.size(); ++gi) {
      const double num = row[gi];
      if (num != kNegInf) acc[gi] += std::exp(num - den);
    }
  }

 private:
  const std::vector<double>& row_for(int i) {
    auto& row = rows_[std::size_t(i)];
    if (row.empty()) {
      row.resize(grid_.size());
      for (std::size_t gi = 0; gi < grid_.size(); ++gi) {
        row[gi] = model_.log_xi(i, grid_[gi]);
      }
    }
    return row;
  }

  const PosteriorModel& model_;
  std::vector<double> grid_;
  std::vector<std::vector<double>> rows_;
  std::vector<int> split_;  // first grid index with t > T_j
};

struct BatchAccumulator {
  explicit BatchAccumulator(std::size_t grid_size, long cycles, int batch_count)
      : total(grid_size, 0.0) {
    batches = int(std::min<long>(batch_count, cycles));
    if (batches < 1) batches = 1;
    batch_size = cycles / batches;
    if (batch_size < 1) batch_size = 1;
    batch_sums.assign(std::size_t(batches), std::vector<double>(grid_size, 0.0));
  }

  void add(long retained_index, std::span<const double> value) {
    for (std::size_t gi = 0; gi < total.size(); ++gi) total[gi] += value[gi];
    const long b = retained_index / batch_size;
    if (b < batches) {
      for (std::size_t gi = 0; gi < total.size(); ++gi) {
        batch_sums[std::size_t(b)][gi] += value[gi];
      }
    }
  }

  // batch-means standard error of the ergodic average
  std::vector<double> standard_error() const {
    std::vector<double> se(total.size(), 0.0);
    if (batches < 2) return se;
    for (std::size_t gi = 0; gi < total.size(); ++gi) {
      double mean = 0.0;
      for (int b = 0; b < batches; ++b) mean += batch_sums[std::size_t(b)][gi];
      mean /= double(batches) * double(batch_size);
      double var = 0.0;
      for (int b = 0; b < batches; ++b) {
        const double bm = batch_sums[std::size_t(b)][gi] / double(batch_size);
        var += (bm - mean) * (bm - mean);
      }
      var /= double(batches - 1);
      se[gi] = std::sqrt(var / double(batches));
    }
    return se;
  }

  std::vector<double> total;
  std::vector<std::vector<double>> batch_sums;
  int batches = 1;
  long batch_size = 1;
};

SPath initial_path(int n, InitialPath init) {
  std::vector<int> coords(std::size_t(n) + 1);
  if (init == InitialPath::identity) {
    for (int j = 0; j <= n; ++j) coords[std::size_t(j)] = j;
  } else {
    std::fill(coords.begin(), coords.end(), 0);
    coords[std::size_t(n)] = n;
  }
  return validate_path(coords);
}

ChainResult run_path_chain(const ChainConfig& config, const PosteriorModel& model) {
  const int n = model.n();
  ChainState state{initial_path(n, config.init), make_rng(config.seed, 1), 0};
  GridXiCache cache(model, config.grid);
  BatchAccumulator acc(config.grid.size(), config.cycles, config.batch_count);
  std::vector<double> cycle_value(config.grid.size());
  ChainResult result;
  double blocks_sum = 0.0;

  std::uniform_int_distribution<int> random_site(1, std::max(1, n - 1));
  const long total_cycles = config.burn_in + config.cycles;
  for (long cycle = 0; cycle < total_cycles; ++cycle) {
    for (int step = 1; step <= n - 1; ++step) {
      const int r = config.random_scan ? random_site(state.rng) : step;
      if (config.kind == SamplerKind::accelerated_path) {
        ap_step(state, r, model);
      } else {
        gibbs_path_step(state, r, model);
      }
    }
    state.cycles_done = cycle + 1;
#ifndef NDEBUG
    validate_path(state.path.coords);
#endif
    if (cycle < config.burn_in) continue;
    const long retained = cycle - config.burn_in;
    std::fill(cycle_value.begin(), cycle_value.end(), 0.0);
    int blocks = 0;
    for (int j = 1; j <= n; ++j) {
      const int m = state.path.increment(j);
      if (m > 0) {
        cache.accumulate_block(j, m, cycle_value);
        ++blocks;
      }
    }
    blocks_sum += blocks;
    acc.add(retained, cycle_value);
    if (config.record_paths) result.path_trace.push_back(state.path);
  }

  result.curve.grid.assign(config.grid.begin(), config.grid.end());
  result.curve.estimate.resize(config.grid.size());
  result.curve.mc_se = acc.standard_error();
  for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
    result.curve.estimate[gi] =
        model.prior_term(config.grid[gi]) + acc.total[gi] / double(config.cycles);
  }
  result.mean_blocks = config.cycles > 0 ? blocks_sum / double(config.cycles) : 0.0;
  return result;
}

ChainResult run_gwcr_chain(const ChainConfig& config, const PosteriorModel& model) {
  const int n = model.n();
  PartitionChainState state;
  state.rng = make_rng(config.seed, 1);
  for (int i = 1; i <= n; ++i) state.cells.push_back({i});
  GridXiCache cache(model, config.grid);
  BatchAccumulator acc(config.grid.size(), config.cycles, config.batch_count);
  std::vector<double> cycle_value(config.grid.size());
  ChainResult result;
  double blocks_sum = 0.0;

  std::uniform_int_distribution<int> random_item(1, std::max(1, n));
  const long total_cycles = config.burn_in + config.cycles;
  for (long cycle = 0; cycle < total_cycles; ++cycle) {
    for (int sweep = 1; sweep <= n; ++sweep) {
      const int item = config.random_scan ? random_item(state.rng) : sweep;
      gwcr_reseat_step(state, item, model);
    }
    state.cycles_done = cycle + 1;
    if (cycle < config.burn_in) continue;
    const long retained = cycle - config.burn_in;
    std::fill(cycle_value.begin(), cycle_value.end(), 0.0);
    for (const auto& cell : state.cells) {
      cache.accumulate_block(cell.back(), int(cell.size()), cycle_value);
    }
    blocks_sum += double(state.cells.size());
    acc.add(retained, cycle_value);
  }

  result.curve.grid.assign(config.grid.begin(), config.grid.end());
  result.curve.estimate.resize(config.grid.size());
  result.curve.mc_se = acc.standard_error();
  for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
    result.curve.estimate[gi] =
        model.prior_term(config.grid[gi]) + acc.total[gi] / double(config.cycles);
  }
  result.mean_blocks = config.cycles > 0 ? blocks_sum / double(config.cycles) : 0.0;
  return result;
}

}  // namespace

ChainResult run_chain(const ChainConfig& config, const PosteriorModel& model) {
  if (config.cycles < 1) throw std::invalid_argument("chain: cycles must be >= 1");
  if (config.burn_in < 0) throw std::invalid_argument("chain: burn_in must be >= 0");
  if (config.kind == SamplerKind::gwcr) return run_gwcr_chain(config, model);
  return run_path_chain(config, model);
}

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix identity_matrix(std::size_t s) {
  Matrix m(s, std::vector<double>(s, 0.0));
  for (std::size_t i = 0; i < s; ++i) m[i][i] = 1.0;
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t s = a.size();
  Matrix out(s, std::vector<double>(s, 0.0));
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t k = 0; k < s; ++k) {
      const double v = a[i][k];
      if (v == 0.0) continue;
      const auto& row = b[k];
      for (std::size_t j = 0; j < s; ++j) out[i][j] += v * row[j];
    }
  }
  return out;
}

std::vector<double> normalized_probs(std::span<const double> log_w) {
  double m = kNegInf;
  for (double w : log_w) m = std::max(m, w);
  std::vector<double> p(log_w.size(), 0.0);
  if (m == kNegInf) throw NumericError("transition matrix: vanishing candidate weights");
  double total = 0.0;
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    p[k] = std::exp(log_w[k] - m);
    total += p[k];
  }
  for (double& x : p) x /= total;
  return p;
}

Matrix path_transition_matrix(const PosteriorModel& model, SamplerKind kind, int cap) {
  const int n = model.n();
  const auto states = enumerate_paths(n, cap);
  std::map<std::vector<int>, int> index;
  for (std::size_t s = 0; s < states.size(); ++s) index[states[s].coords] = int(s);

  Matrix total = identity_matrix(states.size());
  for (int r = 1; r <= n - 1; ++r) {
    Matrix step(states.size(), std::vector<double>(states.size(), 0.0));
    for (std::size_t s = 0; s < states.size(); ++s) {
      SPath path = states[s];
      if (kind == SamplerKind::accelerated_path) {
        const ApProposal prop = ap_candidate_weights(model, path, r);
        const auto probs = normalized_probs(prop.log_w);
        for (int j = prop.j_min; j <= prop.j_max; ++j) {
          SPath target = path;
          for (int l = r; l < prop.q; ++l) target.coords[std::size_t(l)] = j;
          step[s][std::size_t(index.at(target.coords))] += probs[std::size_t(j - prop.j_min)];
        }
      } else {
        const GibbsProposal prop = gibbs_candidate_weights(model, path, r);
        const auto probs = normalized_probs(prop.log_w);
        for (int j = prop.j_min; j <= prop.j_max; ++j) {
          SPath target = path;
          target.coords[std::size_t(r)] = j;
          step[s][std::size_t(index.at(target.coords))] += probs[std::size_t(j - prop.j_min)];
        }
      }
    }
    total = multiply(total, step);
  }
  return total;
}

Matrix gwcr_transition_matrix(const PosteriorModel& model, int cap) {
  const int n = model.n();
  const auto states = enumerate_partitions(n, cap);
  std::map<std::vector<std::vector<int>>, int> index;
  for (std::size_t s = 0; s < states.size(); ++s) index[states[s].cells] = int(s);

  Matrix total = identity_matrix(states.size());
  for (int item = 1; item <= n; ++item) {
    Matrix step(states.size(), std::vector<double>(states.size(), 0.0));
    for (std::size_t s = 0; s < states.size(); ++s) {
      auto cells = states[s].cells;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        auto it = std::lower_bound(cells[c].begin(), cells[c].end(), item);
        if (it != cells[c].end() && *it == item) {
          cells[c].erase(it);
          if (cells[c].empty()) cells.erase(cells.begin() + long(c));
          break;
        }
      }
      const auto log_w = gwcr_candidate_log_weights(cells, item, model);
      const auto probs = normalized_probs(log_w);
      for (std::size_t pick = 0; pick < log_w.size(); ++pick) {
        auto target = cells;
        if (pick == cells.size()) {
          target.push_back({item});
        } else {
          auto& cell = target[pick];
          cell.insert(std::upper_bound(cell.begin(), cell.end(), item), item);
        }
        const Partition canon = validate_partition(std::move(target), n);
        step[s][std::size_t(index.at(canon.cells))] += probs[pick];
      }
    }
    total = multiply(total, step);
  }
  return total;
}

}  // namespace

std::vector<std::vector<double>> transition_matrix(const PosteriorModel& model, SamplerKind kind,
                                                   int cap) {
  if (model.n() > cap) {
    throw NumericError("transition_matrix: n exceeds cap " + std::to_string(cap));
  }
  if (kind == SamplerKind::gwcr) return gwcr_transition_matrix(model, cap);
  return path_transition_matrix(model, kind, cap);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<ComparisonEntry> compare_samplers(const PosteriorModel& model, int reps,
                                              const ChainConfig& base,
                                              std::span<const double> t_points) {
  if (reps < 1) throw std::invalid_argument("compare: reps must be >= 1");
  const SamplerKind kinds[] = {SamplerKind::accelerated_path, SamplerKind::gibbs_path,
                               SamplerKind::gwcr};
  // estimates[kind][rep][t]
  std::vector<std::vector<std::vector<double>>> estimates(
      3, std::vector<std::vector<double>>(std::size_t(reps)));

  struct Job {
    int kind;
    int rep;
  };
  std::vector<Job> jobs;
  for (int k = 0; k < 3; ++k) {
    for (int rep = 0; rep < reps; ++rep) jobs.push_back({k, rep});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t at = next.fetch_add(1);
      if (at >= jobs.size()) return;
      const Job job = jobs[at];
      ChainConfig config = base;
      config.kind = kinds[job.kind];
      config.grid.assign(t_points.begin(), t_points.end());
      config.record_paths = false;
      config.seed = splitmix64(base.seed + splitmix64(std::uint64_t(job.kind) * 1000003ull +
                                                      std::uint64_t(job.rep)));
      estimates[std::size_t(job.kind)][std::size_t(job.rep)] =
          run_chain(config, model).curve.estimate;
    }
  };
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                         unsigned(jobs.size()));
  std::vector<std::thread> threads;
  for (unsigned w = 0; w + 1 < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();

  std::vector<ComparisonEntry> rows;
  for (std::size_t ti = 0; ti < t_points.size(); ++ti) {
    for (int k = 0; k < 3; ++k) {
      ComparisonEntry row;
      row.t = t_points[ti];
      row.kind = kinds[k];
      row.reps = reps;
      double mean = 0.0;
      for (int rep = 0; rep < reps; ++rep) mean += estimates[std::size_t(k)][std::size_t(rep)][ti];
      mean /= double(reps);
      double var = 0.0;
      for (int rep = 0; rep < reps; ++rep) {
        const double d = estimates[std::size_t(k)][std::size_t(rep)][ti] - mean;
        var += d * d;
      }
      row.mean = mean;
      row.sd = reps > 1 ? std::sqrt(var / double(reps - 1)) : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace spath
