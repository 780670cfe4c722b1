#ifndef SPATH_SAMPLERS_HPP
#define SPATH_SAMPLERS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "spath/posterior.hpp"

namespace spath {

enum class SamplerKind { accelerated_path, gibbs_path, gwcr };

const char* sampler_name(SamplerKind kind);

/// Candidate block for one accelerated-path step: the flat stretch
/// S_r..S_{q-1} moves jointly to a value j in [j_min, j_max].
struct ApProposal {
  int r = 0;
  int q = 0;
  int j_min = 0;
  int j_max = 0;
  std::vector<double> log_w;  // indexed j - j_min
};

/// Production weights: the phi factors at locations r and q of the
/// candidate path (all other factors cancel).
ApProposal ap_candidate_weights(const PosteriorModel& model, const SPath& path, int r);

/// The same law from the closed-form step weights of the transition cycle
/// (coefficient * xi products); kept as an independent route for tests.
ApProposal ap_candidate_weights_explicit(const PosteriorModel& model, const SPath& path, int r);

struct GibbsProposal {
  int r = 0;
  int j_min = 0;
  int j_max = 0;
  std::vector<double> log_w;
};

/// Single-site conditional for the naive Gibbs path sampler.
GibbsProposal gibbs_candidate_weights(const PosteriorModel& model, const SPath& path, int r);

struct ChainState {
  SPath path;
  Rng rng;
  long cycles_done = 0;
};

void ap_step(ChainState& state, int r, const PosteriorModel& model);
void gibbs_path_step(ChainState& state, int r, const PosteriorModel& model);

/// Partition-valued baseline state (generalized weighted Chinese
/// restaurant moves: remove one item, reseat by marginal partition weight).
struct PartitionChainState {
  std::vector<std::vector<int>> cells;  // members sorted ascending
  Rng rng;
  long cycles_done = 0;
};

/// Reseat weights for `item` against cells (plus a trailing entry for a
/// new singleton), after item removal.
std::vector<double> gwcr_candidate_log_weights(const std::vector<std::vector<int>>& cells,
                                               int item, const PosteriorModel& model);

void gwcr_reseat_step(PartitionChainState& state, int item, const PosteriorModel& model);

enum class InitialPath { identity, single_block };

struct ChainConfig {
  SamplerKind kind = SamplerKind::accelerated_path;
  long cycles = 1000;  // retained Monte Carlo size M
  long burn_in = 1000;
  std::uint64_t seed = 1;
  std::vector<double> grid;
  InitialPath init = InitialPath::identity;
  bool random_scan = false;
  bool record_paths = false;
  int batch_count = 20;  // batch-means standard error
};

struct HazardCurve {
  std::vector<double> grid;
  std::vector<double> estimate;
  std::vector<double> mc_se;
};

struct ChainResult {
  HazardCurve curve;
  double mean_blocks = 0.0;
  std::vector<SPath> path_trace;  // filled when config.record_paths (path samplers)
};

/// Run one chain: burn_in cycles discarded, then `cycles` retained cycles
/// averaged into the ergodic hazard estimate (prior term added once).
/// Deterministic per (seed, config, model).
ChainResult run_chain(const ChainConfig& config, const PosteriorModel& model);

/// Exact full-cycle transition kernel over enumerate_paths(n) (or
/// enumerate_partitions(n) for the gwcr kind). Row-stochastic.
std::vector<std::vector<double>> transition_matrix(const PosteriorModel& model, SamplerKind kind,
                                                   int cap = 7);

struct ComparisonEntry {
  double t = 0.0;
  SamplerKind kind = SamplerKind::accelerated_path;
  double mean = 0.0;
  double sd = 0.0;  // standard error of the per-replication estimates
  int reps = 0;
};

/// Independent replications per sampler; mean and spread of the hazard
/// estimates at the requested time points. Replications run concurrently
/// on pre-derived seeds, so results are scheduling-independent.
std::vector<ComparisonEntry> compare_samplers(const PosteriorModel& model, int reps,
                                              const ChainConfig& base,
                                              std::span<const double> t_points);

}  // namespace spath

#endif
