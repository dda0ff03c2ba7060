#include "vidalign/synth.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "vidalign/error.hpp"

namespace vidalign {
namespace {

// Cubic coefficients for every (phase, dimension), four per entry.
std::vector<double> draw_profiles(const SynthSpec& spec) {
  SplitMix64 rng(derive_seed(spec.seed, 0));
  std::vector<double> coeffs(static_cast<std::size_t>(spec.phase_count) * spec.feature_dim * 4);
  for (std::size_t e = 0; e < coeffs.size(); e += 4) {
    coeffs[e] = rng.normal(0.0, 1.0);
    coeffs[e + 1] = rng.normal(0.0, 1.0);
    coeffs[e + 2] = rng.normal(0.0, 0.5);
    coeffs[e + 3] = rng.normal(0.0, 0.5);
  }
  return coeffs;
}

void validate_durations(std::span<const int> durations, int phase_count, const char* which) {
  if (static_cast<int>(durations.size()) != phase_count) {
    throw Error(ErrorCode::kInvalidArgument, std::string(which) + " lists " +
                                                 std::to_string(durations.size()) + " durations for " +
                                                 std::to_string(phase_count) + " phases");
  }
  for (int d : durations) {
    if (d < 1) throw Error(ErrorCode::kInvalidArgument, std::string(which) + " has a duration < 1");
  }
  // The ground-truth path needs the last anchor strictly after the last boundary.
  if (durations.back() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(which) + ": the final phase needs at least 2 frames");
  }
}

LabeledSeries render(const SynthSpec& spec, const std::vector<double>& coeffs,
                     std::span<const int> durations, std::uint64_t noise_seed, std::string video_id) {
  const std::size_t frames = std::accumulate(durations.begin(), durations.end(), std::size_t{0});
  const std::size_t dim = spec.feature_dim;
  SplitMix64 noise(noise_seed);

  LabeledSeries out;
  out.series.video_id = video_id;
  out.series.values = Matrix(frames, dim);
  out.annotation.video_id = std::move(video_id);
  out.annotation.phases.reserve(frames);

  std::size_t t = 0;
  const int last = spec.phase_count - 1;
  for (int p = 0; p <= last; ++p) {
    const int len = durations[p];
    for (int q = 0; q < len; ++q, ++t) {
      // Progress runs over [0, 1) in every phase but the last, which ends at 1
      // so the final frames of both videos correspond.
      double u = 0.0;
      if (p < last) {
        u = static_cast<double>(q) / len;
      } else if (len > 1) {
        u = static_cast<double>(q) / (len - 1);
      }
      const double* c = &coeffs[static_cast<std::size_t>(p) * dim * 4];
      for (std::size_t d = 0; d < dim; ++d, c += 4) {
        const double value = c[0] + u * (c[1] + u * (c[2] + u * c[3]));
        out.series.values(t, d) = value + spec.noise_std * noise.normal();
      }
      out.annotation.phases.push_back(p + 1);
    }
  }
  return out;
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.phase_count < 1) throw Error(ErrorCode::kInvalidArgument, "phase count must be >= 1");
  if (spec.feature_dim < 1) throw Error(ErrorCode::kInvalidArgument, "feature dim must be >= 1");
  if (!(spec.noise_std >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise std must be >= 0");
  validate_durations(spec.durations_a, spec.phase_count, "durations_a");
  validate_durations(spec.durations_b, spec.phase_count, "durations_b");
}

LabeledSeries generate_video(const SynthSpec& spec, std::span<const int> durations,
                             std::uint64_t noise_seed, std::string video_id) {
  if (spec.phase_count < 1) throw Error(ErrorCode::kInvalidArgument, "phase count must be >= 1");
  validate_durations(durations, spec.phase_count, "durations");
  return render(spec, draw_profiles(spec), durations, noise_seed, std::move(video_id));
}

SynthPair generate_pair(const SynthSpec& spec, std::uint64_t noise_seed) {
  validate(spec);
  const auto coeffs = draw_profiles(spec);
  LabeledSeries a = render(spec, coeffs, spec.durations_a, derive_seed(noise_seed, 1), "synth_a");
  LabeledSeries b = render(spec, coeffs, spec.durations_b, derive_seed(noise_seed, 2), "synth_b");

  SynthPair out;
  out.truth = ground_truth_path(a.annotation, b.annotation);
  out.a = std::move(a.series);
  out.b = std::move(b.series);
  out.annotation_a = std::move(a.annotation);
  out.annotation_b = std::move(b.annotation);
  return out;
}

std::vector<int> random_durations(int phase_count, int min_len, int max_len, SplitMix64& rng) {
  if (min_len < 1 || max_len < min_len) {
    throw Error(ErrorCode::kInvalidArgument, "duration range must satisfy 1 <= min <= max");
  }
  std::vector<int> out(static_cast<std::size_t>(phase_count));
  for (int& d : out) d = static_cast<int>(rng.between(min_len, max_len));
  return out;
}

WaitPhaseResult add_wait_phase(const FeatureSeries& series, const PhaseAnnotation& annotation,
                               WaitStrategy strategy) {
  const std::size_t frames = series.frames();
  if (frames < 3) {
    throw Error(ErrorCode::kTooShort, "wait phase needs at least 3 frames, got " +
                                          std::to_string(frames));
  }
  if (annotation.frames() != frames) {
    throw Error(ErrorCode::kLengthMismatch, "annotation and series lengths differ");
  }
  const std::size_t extra = wait_frames(frames);

  WaitPhaseResult out;
  out.series.video_id = series.video_id;
  out.series.values = Matrix(frames + extra, series.width());
  for (std::size_t q = 0; q < extra; ++q) {
    const std::size_t src = strategy == WaitStrategy::kCycleFirstThree ? q % 3 : 0;
    std::copy(series.values.row(src).begin(), series.values.row(src).end(),
              out.series.values.row(q).begin());
  }
  for (std::size_t t = 0; t < frames; ++t) {
    std::copy(series.values.row(t).begin(), series.values.row(t).end(),
              out.series.values.row(extra + t).begin());
  }

  out.annotation.video_id = annotation.video_id;
  out.annotation.phases.assign(extra, 1);
  out.annotation.phases.insert(out.annotation.phases.end(), annotation.phases.begin(),
                               annotation.phases.end());
  return out;
}

}  // namespace vidalign
