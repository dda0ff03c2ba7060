#pragma once

// File formats shared by the CLI and the extractor. All text writers print
// doubles in shortest round-trip form, so write -> read -> write reproduces
// the same bytes. Binary formats are little-endian.
//
// Readers throw Error(kSchema) with "<source>:<line>: ..." for malformed
// content and Error(kIo) for unreadable files.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "vidalign/align.hpp"
#include "vidalign/eval.hpp"
#include "vidalign/features.hpp"
#include "vidalign/series.hpp"

namespace vidalign {

std::string format_double(double value);
// Accepts everything format_double produces, including "inf" and "nan".
double parse_double(std::string_view text);

// ---------------------------------------------------------------------------
// Track file: one JSON object per line and per frame, frames numbered 1..T
//   {"frame":1,"box":{"cx":..,"cy":..,"w":..,"h":..},"pose":[[x,y],... x24]}
// "box" and "pose" may be null.
SubjectTrack read_track(std::istream& in, std::string_view source = "<track>");
void write_track(std::ostream& out, const SubjectTrack& track);

// Global features file: one line per frame
//   {"frame":1,"global":[64 numbers]}
GlobalFeatures read_global(std::istream& in, std::string_view source = "<global>");
void write_global(std::ostream& out, const GlobalFeatures& global);

// ---------------------------------------------------------------------------
// Series binary layout:
//   8 bytes  magic "VASERIE1"
//   u32      T (frames)
//   u32      D (width)
//   u32      id length L
//   L bytes  video id (UTF-8)
//   T*D f64  values, row-major
// Series CSV: "#video_id=<id>" then T lines of D comma-separated values.
enum class SeriesFormat { kBinary, kCsv };

void write_series(std::ostream& out, const FeatureSeries& series, SeriesFormat format);
// Detects the format from the first bytes.
FeatureSeries read_series(std::istream& in, std::string_view source = "<series>");

// ---------------------------------------------------------------------------
// Path file: "#key=value" header lines (format, a, b, n, k, method, margin,
// lambda, total_cost) followed by one "i,j" line per step.
struct PathFile {
  std::string video_a;
  std::string video_b;
  std::size_t n = 0;
  std::size_t k = 0;
  AlignmentResult result;
};

void write_path(std::ostream& out, const PathFile& file);
PathFile read_path(std::istream& in, std::string_view source = "<path>");

// ---------------------------------------------------------------------------
// Annotation file: one line per video
//   {"videoId":"clip_01","phases":[1,1,2,2,3]}
std::vector<PhaseAnnotation> read_annotations(std::istream& in,
                                              std::string_view source = "<annotations>");
void write_annotations(std::ostream& out, const std::vector<PhaseAnnotation>& annotations);

// Ground-truth file: {"n":..,"k":..,"anchors":[[x,y],...]}
struct GroundTruthFile {
  std::size_t n = 0;
  std::size_t k = 0;
  GroundTruthPath path;
};
void write_ground_truth(std::ostream& out, const GroundTruthFile& file);
GroundTruthFile read_ground_truth(std::istream& in, std::string_view source = "<ground-truth>");

// ---------------------------------------------------------------------------
// Report file: pretty-printed JSON
//   {"eae":..,"correctPhaseRate":..,"accuracy":..,"config":{...}}
// Missing metrics are written as null. Config keys keep insertion order.
using ConfigValue = std::variant<bool, std::int64_t, double, std::string>;
using ReportConfig = std::vector<std::pair<std::string, ConfigValue>>;

struct ReportFile {
  EvalReport report;
  ReportConfig config;
};
void write_report(std::ostream& out, const ReportFile& file);
ReportFile read_report(std::istream& in, std::string_view source = "<report>");

// ---------------------------------------------------------------------------
// Mask binary layout: 8 bytes magic "VAMASKF4", u32 H, u32 W, then H*W f32
// row-major. Mask text: "H W" then H lines of W space-separated values.
void write_mask(std::ostream& out, const Matrix& mask, bool text = false);
Matrix read_mask(std::istream& in, std::string_view source = "<mask>");

// ---------------------------------------------------------------------------
// Whole-file helpers. Writers go through a temporary file in the target
// directory and rename it into place.
std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace vidalign
