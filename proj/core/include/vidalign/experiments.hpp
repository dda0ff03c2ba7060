#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vidalign/align.hpp"
#include "vidalign/eval.hpp"

namespace vidalign {

// Shared knobs for the synthetic alignment suites. Each pair i draws its
// action, durations and noise from derive_seed(seed, i), so results do not
// depend on `jobs`.
struct ExperimentOptions {
  std::size_t pairs = 100;
  std::uint64_t seed = 1;
  int min_phases = 3;
  int max_phases = 5;
  int min_duration = 10;
  int max_duration = 20;
  std::size_t feature_dim = kFeatureWidth;
  double noise_std = 0.2;
  // z-normalize each series before alignment, as build_series does.
  bool normalize = true;
  std::optional<double> margin;  // unset: default_margin(n, k)
  double lambda = kDefaultLambda;
  // Corridor suite: a low-cost band bulging away from the ground truth by
  // `corridor_bulge` of the table's short side, with cells priced at a
  // random fraction in [min, max] of the mean ground-truth cell cost.
  double corridor_bulge = 0.35;
  double corridor_min_factor = 0.3;
  double corridor_max_factor = 0.6;
  std::size_t jobs = 1;
};

struct MethodScore {
  AlignMethod method = AlignMethod::kDtw;
  double eae = 0.0;
  double correct_phase_rate = 0.0;
};

struct PairOutcome {
  std::size_t pair = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<MethodScore> scores;  // same order as SuiteReport::methods

  const MethodScore& score(AlignMethod method) const;
};

struct SuiteReport {
  std::string name;
  std::vector<AlignMethod> methods;
  std::vector<PairOutcome> pairs;

  double median_eae(AlignMethod method) const;
  double median_correct_phase_rate(AlignMethod method) const;
  // Fraction of pairs where `better` has EAE <= `baseline`.
  double fraction_not_worse(AlignMethod better, AlignMethod baseline) const;
};

// Idle-start experiment: video B of each pair gets add_wait_phase and is
// aligned against the untouched video A with trivial, DTW and DDTW.
SuiteReport run_wait_phase_suite(const ExperimentOptions& options);

// Spurious-similarity experiment: a low-cost corridor is written into the
// distance table away from the true correspondence; DTW and DDTW both align
// the modified table.
SuiteReport run_corridor_suite(const ExperimentOptions& options);

struct CorridorSpec {
  double bulge = 0.35;   // peak offset as a fraction of min(n, k)
  double factor = 0.5;   // corridor cost relative to the mean truth-cell cost
  int half_width = 1;    // cells on each side of the corridor centre line
  bool upward = true;    // bulge toward larger j
};

// Lowers the cost of cells near the curve j = truth(i) +/- bulge sin(pi t),
// t running 0..1 along the video. Cells are only ever lowered.
void inject_corridor(CostMatrix& costs, const GroundTruthPath& truth, const CorridorSpec& spec);

// `videos` noisy renditions of one synthetic action with random durations.
std::vector<LabeledSeries> synthetic_phase_dataset(std::size_t videos, int phase_count,
                                                   std::uint64_t seed, double noise_std = 0.2,
                                                   std::size_t feature_dim = kFeatureWidth);

}  // namespace vidalign
