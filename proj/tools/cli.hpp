#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vidalign::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // computation failed on valid input
inline constexpr int kExitInput = 2;    // unreadable, malformed or inconsistent input

// Dataset manifest (JSON):
//   {"action": "golf_swing",
//    "entries": [{"videoId": "v01", "trackPath": "v01.track.jsonl",
//                 "globalPath": "v01.global.jsonl", "annotationPath": "ann.jsonl"}]}
// Relative paths resolve against the manifest's directory.
struct ManifestEntry {
  std::string video_id;
  std::filesystem::path track_path;
  std::filesystem::path global_path;
  std::optional<std::filesystem::path> annotation_path;
};

struct DatasetManifest {
  std::string action;
  std::vector<ManifestEntry> entries;
};

// Throws Error(kSchema) for malformed manifests or duplicate ids and
// Error(kIo) naming the first referenced file that does not exist.
DatasetManifest read_manifest(const std::filesystem::path& path);

// Runs the tool with argv-style arguments (args[0] is the program name).
// Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vidalign::cli
