#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vidalign/eval.hpp"
#include "vidalign/random.hpp"
#include "vidalign/series.hpp"

namespace vidalign {

// Synthetic action: every phase owns a smooth cubic trajectory per dimension
// (coefficients drawn from `seed`), traversed at constant speed while the
// phase lasts. Two videos of the action share the trajectories and differ in
// phase durations and additive noise.
struct SynthSpec {
  int phase_count = 3;
  std::vector<int> durations_a;
  std::vector<int> durations_b;
  std::size_t feature_dim = kFeatureWidth;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

struct SynthPair {
  FeatureSeries a;
  FeatureSeries b;
  PhaseAnnotation annotation_a;
  PhaseAnnotation annotation_b;
  GroundTruthPath truth;
};

// Throws kInvalidArgument for non-positive phase counts or durations, or
// duration lists whose length differs from phase_count.
void validate(const SynthSpec& spec);

// Noise for video A and B is drawn from two streams derived from noise_seed.
SynthPair generate_pair(const SynthSpec& spec, std::uint64_t noise_seed);

// One video of the action described by spec (durations_a/b are ignored).
LabeledSeries generate_video(const SynthSpec& spec, std::span<const int> durations,
                             std::uint64_t noise_seed, std::string video_id = {});

// Durations drawn uniformly from [min_len, max_len].
std::vector<int> random_durations(int phase_count, int min_len, int max_len, SplitMix64& rng);

enum class WaitStrategy {
  // Prepended frames repeat frames 1, 2, 3, 1, 2, 3, ...
  kCycleFirstThree,
  // Prepended frames all copy frame 1.
  kHoldFirst,
};

struct WaitPhaseResult {
  FeatureSeries series;
  PhaseAnnotation annotation;
};

// Prepends ceil(T/2) idle frames, giving ceil(3T/2) frames in total. The idle
// frames extend phase 1. Throws kTooShort when T < 3 and kLengthMismatch
// when the annotation length differs from the series.
WaitPhaseResult add_wait_phase(const FeatureSeries& series, const PhaseAnnotation& annotation,
                               WaitStrategy strategy = WaitStrategy::kCycleFirstThree);

// Number of frames add_wait_phase prepends to a T-frame video.
inline std::size_t wait_frames(std::size_t frames) { return (frames + 1) / 2; }

}  // namespace vidalign
