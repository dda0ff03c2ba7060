#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vidalign/vidalign.hpp"

namespace vidalign::cli {
namespace fs = std::filesystem;

namespace {

using Json = nlohmann::ordered_json;

// Plain-text run log; a no-op unless --log is given.
class RunLog {
 public:
  void open(const std::string& path) {
    if (path.empty()) return;
    file_.open(path, std::ios::app);
    if (!file_) throw Error(ErrorCode::kIo, "cannot open log file " + path);
  }

  void line(const std::string& message) {
    if (!file_.is_open()) return;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::lock_guard lock(mutex_);
    file_ << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << message << '\n';
  }

 private:
  std::ofstream file_;
  std::mutex mutex_;
};

FeatureSeries load_series(const fs::path& path) {
  std::istringstream in(read_file(path));
  return read_series(in, path.string());
}

template <typename Writer>
void save(const fs::path& path, Writer&& writer) {
  std::ostringstream out;
  writer(out);
  write_file_atomic(path, out.str());
}

std::optional<double> parse_margin(const std::string& text) {
  if (text == "auto") return std::nullopt;
  double value = 0.0;
  try {
    value = parse_double(text);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument, "--margin must be 'auto' or a number, got '" + text + "'");
  }
  if (!(value >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "--margin must be non-negative");
  return value;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": bad integer '" + item + "'");
    }
  }
  return out;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

ConfigValue number_or_text(double value) {
  if (std::isfinite(value)) return value;
  return format_double(value);
}

const PhaseAnnotation& find_annotation(const std::map<std::string, PhaseAnnotation>& index,
                                       const std::string& id) {
  const auto it = index.find(id);
  if (it == index.end()) throw Error(ErrorCode::kSchema, "no annotation for video '" + id + "'");
  return it->second;
}

std::map<std::string, PhaseAnnotation> load_annotations(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::map<std::string, PhaseAnnotation> index;
  for (auto& a : read_annotations(in, path.string())) index.emplace(a.video_id, std::move(a));
  return index;
}

SeriesFormat parse_format(const std::string& text) {
  return text == "csv" ? SeriesFormat::kCsv : SeriesFormat::kBinary;
}

std::string series_extension(SeriesFormat format) {
  return format == SeriesFormat::kCsv ? ".csv" : ".series";
}

// ---------------------------------------------------------------------------

struct BuildArgs {
  std::string manifest;
  std::string out_dir;
  std::string format = "bin";
  std::size_t jobs = 1;
};

int cmd_build(const BuildArgs& args, RunLog& log, std::ostream& out, std::ostream& err) {
  const DatasetManifest manifest = read_manifest(args.manifest);
  const SeriesFormat format = parse_format(args.format);
  fs::create_directories(args.out_dir);

  std::vector<std::string> summaries(manifest.entries.size());
  std::vector<std::string> errors(manifest.entries.size());
  parallel_for(manifest.entries.size(), args.jobs, [&](std::size_t e) {
    const ManifestEntry& entry = manifest.entries[e];
    try {
      std::istringstream track_in(read_file(entry.track_path));
      const SubjectTrack track = read_track(track_in, entry.track_path.string());
      std::istringstream global_in(read_file(entry.global_path));
      const GlobalFeatures global = read_global(global_in, entry.global_path.string());
      if (global.rows() != track.size()) {
        throw Error(ErrorCode::kLengthMismatch, "track has " + std::to_string(track.size()) +
                                                    " frames, global features " +
                                                    std::to_string(global.rows()));
      }
      const FeatureSeries series = build_series(track, global, entry.video_id);
      const fs::path target = fs::path(args.out_dir) / (entry.video_id + series_extension(format));
      save(target, [&](std::ostream& o) { write_series(o, series, format); });
      summaries[e] = entry.video_id + " T=" + std::to_string(track.size()) +
                     " interpolated_boxes=" + std::to_string(track.missing_boxes()) +
                     " interpolated_poses=" + std::to_string(track.missing_poses()) + " -> " +
                     target.string();
    } catch (const Error& ex) {
      errors[e] = entry.video_id + ": " + ex.what();
    }
  });

  bool failed = false;
  for (std::size_t e = 0; e < manifest.entries.size(); ++e) {
    if (!errors[e].empty()) {
      err << "error: " << errors[e] << '\n';
      log.line("build error " + errors[e]);
      failed = true;
    } else {
      out << summaries[e] << '\n';
      log.line("build " + summaries[e]);
    }
  }
  return failed ? kExitInput : kExitOk;
}

// ---------------------------------------------------------------------------

struct MaskArgs {
  int width = 0;
  int height = 0;
  std::string box;
  double margin = 20.0;
  double drop = 0.2;
  bool pixel_scale = false;
  bool text = false;
  std::string out;
};

int cmd_mask(const MaskArgs& args, RunLog& log, std::ostream& out) {
  std::vector<double> parts;
  {
    std::stringstream in(args.box);
    std::string item;
    while (std::getline(in, item, ',')) parts.push_back(parse_double(item));
  }
  if (parts.size() != 4) throw Error(ErrorCode::kInvalidArgument, "--box expects cx,cy,w,h");
  const Box box{{parts[0], parts[1]}, parts[2], parts[3]};
  MaskOptions options;
  options.margin_px = args.margin;
  options.outside_drop = args.drop;
  options.scale = args.pixel_scale ? MaskScale::kPixels : MaskScale::kNormalized;

  const WeightMask mask = gaussian_mask(args.width, args.height, box, options);
  save(args.out, [&](std::ostream& o) { write_mask(o, mask.values, args.text); });
  const auto& r = mask.margin_box;
  std::ostringstream summary;
  summary << "mask " << args.height << "x" << args.width << " mbox=" << r.x0 << ',' << r.y0 << ','
          << r.x1 << ',' << r.y1 << " boundary_min=" << format_double(mask.boundary_min)
          << " outside=" << format_double(mask.outside_value) << " -> " << args.out;
  out << summary.str() << '\n';
  log.line(summary.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AlignArgs {
  std::string a;
  std::string b;
  std::string pairs;
  std::string out;
  std::string out_dir;
  std::string summary;
  std::string method = "ddtw";
  std::string margin = "auto";
  double lambda = kDefaultLambda;
  std::size_t jobs = 1;
};

PathFile align_files(const fs::path& a_path, const fs::path& b_path, const AlignmentConfig& config) {
  const FeatureSeries a = load_series(a_path);
  const FeatureSeries b = load_series(b_path);
  PathFile file;
  file.video_a = a.video_id;
  file.video_b = b.video_id;
  file.n = a.frames();
  file.k = b.frames();
  file.result = align(a, b, config);
  return file;
}

int cmd_align(const AlignArgs& args, RunLog& log, std::ostream& out) {
  AlignmentConfig config;
  config.method = parse_align_method(args.method);
  config.margin = parse_margin(args.margin);
  config.lambda = args.lambda;
  if (!(config.lambda >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "--lambda must be non-negative");

  if (args.pairs.empty()) {
    if (args.a.empty() || args.b.empty() || args.out.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "single-pair mode needs --a, --b and --out");
    }
    const PathFile file = align_files(args.a, args.b, config);
    save(args.out, [&](std::ostream& o) { write_path(o, file); });
    std::ostringstream line;
    line << file.video_a << ' ' << file.video_b << ' ' << to_string(file.result.method)
         << " n=" << file.n << " k=" << file.k
         << " total_cost=" << format_double(file.result.total_cost) << " -> " << args.out;
    out << line.str() << '\n';
    log.line("align " + line.str());
    return kExitOk;
  }

  if (args.out_dir.empty()) throw Error(ErrorCode::kInvalidArgument, "batch mode needs --out-dir");
  const fs::path pairs_path(args.pairs);
  std::vector<std::pair<fs::path, fs::path>> pairs;
  {
    std::istringstream in(read_file(pairs_path));
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
      ++line;
      if (!text.empty() && text.back() == '\r') text.pop_back();
      if (text.empty() || text.front() == '#') continue;
      const std::size_t comma = text.find(',');
      if (comma == std::string::npos) {
        throw Error(ErrorCode::kSchema, args.pairs + ":" + std::to_string(line) +
                                            ": expected 'seriesA,seriesB'");
      }
      auto resolve = [&](std::string p) {
        fs::path path(p);
        return path.is_relative() ? pairs_path.parent_path() / path : path;
      };
      pairs.emplace_back(resolve(text.substr(0, comma)), resolve(text.substr(comma + 1)));
    }
  }

  fs::create_directories(args.out_dir);
  std::vector<PathFile> results(pairs.size());
  std::vector<std::string> names(pairs.size());
  parallel_for(pairs.size(), args.jobs, [&](std::size_t p) {
    results[p] = align_files(pairs[p].first, pairs[p].second, config);
    std::ostringstream name;
    name << std::setw(4) << std::setfill('0') << p << '_' << results[p].video_a << "__"
         << results[p].video_b << ".path";
    names[p] = (fs::path(args.out_dir) / name.str()).string();
    save(names[p], [&](std::ostream& o) { write_path(o, results[p]); });
  });

  const std::string summary_path =
      args.summary.empty() ? (fs::path(args.out_dir) / "summary.csv").string() : args.summary;
  save(summary_path, [&](std::ostream& o) {
    o << "pair,a,b,method,n,k,margin,lambda,total_cost,path_file\n";
    for (std::size_t p = 0; p < results.size(); ++p) {
      const PathFile& r = results[p];
      o << p << ',' << csv_field(r.video_a) << ',' << csv_field(r.video_b) << ','
        << to_string(r.result.method) << ',' << r.n << ',' << r.k << ','
        << format_double(r.result.margin) << ',' << format_double(r.result.lambda) << ','
        << format_double(r.result.total_cost) << ',' << csv_field(names[p]) << '\n';
    }
  });
  out << "aligned " << results.size() << " pairs -> " << summary_path << '\n';
  log.line("align batch " + std::to_string(results.size()) + " pairs -> " + summary_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> paths;
  std::string annotations;
  std::string a_id;
  std::string b_id;
  std::string out;
  std::string summary;
};

struct PairEval {
  PathFile file;
  double eae = 0.0;
  double cpr = 0.0;
};

PairEval evaluate_path(const fs::path& path, const std::map<std::string, PhaseAnnotation>& index,
                       const std::string& a_id, const std::string& b_id) {
  std::istringstream in(read_file(path));
  PairEval result;
  result.file = read_path(in, path.string());
  const PhaseAnnotation& a = find_annotation(index, a_id.empty() ? result.file.video_a : a_id);
  const PhaseAnnotation& b = find_annotation(index, b_id.empty() ? result.file.video_b : b_id);
  if (a.frames() != result.file.n || b.frames() != result.file.k) {
    throw Error(ErrorCode::kLengthMismatch,
                "annotations have " + std::to_string(a.frames()) + " x " + std::to_string(b.frames()) +
                    " frames, path spans " + std::to_string(result.file.n) + " x " +
                    std::to_string(result.file.k));
  }
  const GroundTruthPath truth = ground_truth_path(a, b);
  result.eae = eae(result.file.result.path, truth, result.file.n, result.file.k);
  result.cpr = correct_phase_rate(result.file.result.path, a, b);
  return result;
}

int cmd_eval(const EvalArgs& args, RunLog& log, std::ostream& out) {
  const auto index = load_annotations(args.annotations);
  if (args.paths.size() > 1 && (!args.a_id.empty() || !args.b_id.empty())) {
    throw Error(ErrorCode::kInvalidArgument, "--a-id/--b-id only apply to a single --path");
  }
  std::vector<PairEval> evals;
  for (const auto& p : args.paths) evals.push_back(evaluate_path(p, index, args.a_id, args.b_id));

  ReportFile report;
  if (evals.size() == 1) {
    const PairEval& e = evals.front();
    report.report.eae = e.eae;
    report.report.correct_phase_rate = e.cpr;
    report.config = {{"command", std::string("eval")},
                     {"path", args.paths.front()},
                     {"annotations", args.annotations},
                     {"a", e.file.video_a},
                     {"b", e.file.video_b},
                     {"n", static_cast<std::int64_t>(e.file.n)},
                     {"k", static_cast<std::int64_t>(e.file.k)},
                     {"method", std::string(to_string(e.file.result.method))},
                     {"margin", number_or_text(e.file.result.margin)},
                     {"lambda", number_or_text(e.file.result.lambda)}};
  } else {
    double eae_sum = 0.0;
    double cpr_sum = 0.0;
    for (const auto& e : evals) {
      eae_sum += e.eae;
      cpr_sum += e.cpr;
    }
    report.report.eae = eae_sum / static_cast<double>(evals.size());
    report.report.correct_phase_rate = cpr_sum / static_cast<double>(evals.size());
    report.config = {{"command", std::string("eval")},
                     {"annotations", args.annotations},
                     {"pairs", static_cast<std::int64_t>(evals.size())},
                     {"aggregate", std::string("mean")}};
  }

  if (!args.summary.empty()) {
    save(args.summary, [&](std::ostream& o) {
      o << "path,a,b,method,eae,correct_phase_rate\n";
      for (std::size_t i = 0; i < evals.size(); ++i) {
        const auto& e = evals[i];
        o << csv_field(args.paths[i]) << ',' << csv_field(e.file.video_a) << ','
          << csv_field(e.file.video_b) << ',' << to_string(e.file.result.method) << ','
          << format_double(e.eae) << ',' << format_double(e.cpr) << '\n';
      }
    });
  }

  std::ostringstream doc;
  write_report(doc, report);
  if (args.out.empty()) {
    out << doc.str();
  } else {
    write_file_atomic(args.out, doc.str());
    out << "eae=" << format_double(*report.report.eae)
        << " correct_phase_rate=" << format_double(*report.report.correct_phase_rate) << " -> "
        << args.out << '\n';
  }
  log.line("eval " + std::to_string(evals.size()) + " paths eae=" + format_double(*report.report.eae));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  std::vector<std::string> series;
  std::string annotations;
  std::size_t folds = kDefaultFolds;
  std::size_t neighbors = kDefaultNeighbors;
  std::uint64_t seed = 0;
  std::string role = "others";
  std::string out;
};

int cmd_classify(const ClassifyArgs& args, RunLog& log, std::ostream& out) {
  const auto index = load_annotations(args.annotations);
  std::vector<LabeledSeries> dataset;
  for (const auto& path : args.series) {
    FeatureSeries s = load_series(path);
    const PhaseAnnotation& a = find_annotation(index, s.video_id);
    dataset.push_back({std::move(s), a});
  }
  CrossValidationOptions options;
  options.folds = args.folds;
  options.neighbors = args.neighbors;
  options.seed = args.seed;
  options.role = args.role == "fold" ? FoldRole::kTrainOnFold : FoldRole::kTrainOnOthers;
  const CrossValidationResult cv = cross_validate(dataset, options);

  ReportFile report;
  report.report.classification_accuracy = cv.accuracy;
  report.config = {{"command", std::string("classify")},
                   {"annotations", args.annotations},
                   {"videos", static_cast<std::int64_t>(dataset.size())},
                   {"folds", static_cast<std::int64_t>(args.folds)},
                   {"k", static_cast<std::int64_t>(args.neighbors)},
                   {"seed", static_cast<std::int64_t>(args.seed)},
                   {"role", args.role},
                   {"classifier", std::string("knn")}};
  std::ostringstream doc;
  write_report(doc, report);
  if (args.out.empty()) {
    out << doc.str();
  } else {
    write_file_atomic(args.out, doc.str());
    out << "accuracy=" << format_double(cv.accuracy) << " (" << cv.correct_frames << "/"
        << cv.tested_frames << " frames) -> " << args.out << '\n';
  }
  log.line("classify accuracy=" + format_double(cv.accuracy));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  std::uint64_t seed = 0;
  int phases = 3;
  std::string durations_a;
  std::string durations_b;
  int min_duration = 10;
  int max_duration = 20;
  double noise = 0.0;
  std::size_t dim = kFeatureWidth;
  bool wait_phase = false;
  std::string wait_strategy = "cycle";
  std::string format = "bin";
};

int cmd_synth(const SynthArgs& args, RunLog& log, std::ostream& out) {
  SynthSpec spec;
  spec.phase_count = args.phases;
  spec.feature_dim = args.dim;
  spec.noise_std = args.noise;
  spec.seed = derive_seed(args.seed, 0);
  SplitMix64 rng(derive_seed(args.seed, 2));
  spec.durations_a = args.durations_a.empty()
                         ? random_durations(args.phases, args.min_duration, args.max_duration, rng)
                         : parse_int_list(args.durations_a, "--durations-a");
  spec.durations_b = args.durations_b.empty()
                         ? random_durations(args.phases, args.min_duration, args.max_duration, rng)
                         : parse_int_list(args.durations_b, "--durations-b");

  SynthPair pair = generate_pair(spec, derive_seed(args.seed, 1));
  if (args.wait_phase) {
    const WaitStrategy strategy =
        args.wait_strategy == "hold" ? WaitStrategy::kHoldFirst : WaitStrategy::kCycleFirstThree;
    WaitPhaseResult waited = add_wait_phase(pair.b, pair.annotation_b, strategy);
    pair.b = std::move(waited.series);
    pair.annotation_b = std::move(waited.annotation);
    pair.truth = ground_truth_path(pair.annotation_a, pair.annotation_b);
  }

  const SeriesFormat format = parse_format(args.format);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  for (const FeatureSeries* s : {&pair.a, &pair.b}) {
    save(dir / (s->video_id + series_extension(format)),
         [&](std::ostream& o) { write_series(o, *s, format); });
  }
  save(dir / "annotations.jsonl",
       [&](std::ostream& o) { write_annotations(o, {pair.annotation_a, pair.annotation_b}); });
  save(dir / "truth.json", [&](std::ostream& o) {
    write_ground_truth(o, {pair.a.frames(), pair.b.frames(), pair.truth});
  });

  std::ostringstream line;
  line << "synth seed=" << args.seed << " n=" << pair.a.frames() << " k=" << pair.b.frames()
       << " phases=" << args.phases << (args.wait_phase ? " wait_phase" : "") << " -> " << dir.string();
  out << line.str() << '\n';
  log.line(line.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchmarkArgs {
  std::string suite = "all";
  std::size_t pairs = 100;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t jobs = 1;
  double noise = 0.2;
  std::size_t dim = kFeatureWidth;
  std::string margin = "auto";
  double lambda = kDefaultLambda;
  bool no_normalize = false;
};

void write_suite_rows(std::ostream& o, const SuiteReport& report) {
  for (const PairOutcome& p : report.pairs) {
    for (const MethodScore& s : p.scores) {
      o << report.name << ',' << p.pair << ',' << p.n << ',' << p.k << ',' << to_string(s.method)
        << ',' << format_double(s.eae) << ',' << format_double(s.correct_phase_rate) << '\n';
    }
  }
  for (AlignMethod m : report.methods) {
    o << report.name << ",median,,," << to_string(m) << ',' << format_double(report.median_eae(m))
      << ',' << format_double(report.median_correct_phase_rate(m)) << '\n';
  }
}

int cmd_benchmark(const BenchmarkArgs& args, RunLog& log, std::ostream& out) {
  ExperimentOptions options;
  options.pairs = args.pairs;
  options.seed = args.seed;
  options.jobs = args.jobs;
  options.noise_std = args.noise;
  options.feature_dim = args.dim;
  options.margin = parse_margin(args.margin);
  options.lambda = args.lambda;
  options.normalize = !args.no_normalize;

  std::vector<SuiteReport> reports;
  if (args.suite == "wait" || args.suite == "all") reports.push_back(run_wait_phase_suite(options));
  if (args.suite == "corridor" || args.suite == "all") reports.push_back(run_corridor_suite(options));

  save(args.out, [&](std::ostream& o) {
    o << "suite,pair,n,k,method,eae,correct_phase_rate\n";
    for (const auto& r : reports) write_suite_rows(o, r);
  });
  for (const auto& r : reports) {
    for (AlignMethod m : r.methods) {
      std::ostringstream line;
      line << r.name << ' ' << to_string(m) << " median_eae=" << format_double(r.median_eae(m))
           << " median_cpr=" << format_double(r.median_correct_phase_rate(m));
      out << line.str() << '\n';
      log.line("benchmark " + line.str());
    }
  }
  out << "-> " << args.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> tracks;
  std::vector<std::string> globals;
  std::vector<std::string> annotations;
  std::vector<std::string> series;
  std::vector<std::string> paths;
  std::vector<std::string> masks;
};

int cmd_validate(const ValidateArgs& args, RunLog& log, std::ostream& out, std::ostream& err) {
  std::size_t failures = 0;
  auto check = [&](const std::string& kind, const std::string& path, auto&& validator) {
    try {
      std::istringstream in(read_file(path));
      const std::string detail = validator(in, path);
      out << "ok " << kind << ' ' << path << (detail.empty() ? "" : " " + detail) << '\n';
    } catch (const Error& e) {
      ++failures;
      err << "invalid " << kind << ' ' << path << ": " << e.what() << '\n';
      log.line("validate " + kind + " " + path + ": " + e.what());
    }
  };

  for (const auto& p : args.tracks) {
    check("track", p, [](std::istream& in, const std::string& src) {
      const SubjectTrack track = read_track(in, src);
      if (track.size() < 2) throw Error(ErrorCode::kSchema, src + ": a track needs at least 2 frames");
      if (track.missing_boxes() == track.size()) throw Error(ErrorCode::kSchema, src + ": no frame has a box");
      if (track.missing_poses() == track.size()) throw Error(ErrorCode::kSchema, src + ": no frame has a pose");
      return "T=" + std::to_string(track.size()) + " missing_boxes=" + std::to_string(track.missing_boxes()) +
             " missing_poses=" + std::to_string(track.missing_poses());
    });
  }
  for (const auto& p : args.globals) {
    check("global", p, [](std::istream& in, const std::string& src) {
      const GlobalFeatures g = read_global(in, src);
      if (g.rows() == 0) throw Error(ErrorCode::kSchema, src + ": no frames");
      return "T=" + std::to_string(g.rows()) + " D=" + std::to_string(g.cols());
    });
  }
  for (const auto& p : args.annotations) {
    check("annotations", p, [](std::istream& in, const std::string& src) {
      return "videos=" + std::to_string(read_annotations(in, src).size());
    });
  }
  for (const auto& p : args.series) {
    check("series", p, [](std::istream& in, const std::string& src) {
      const FeatureSeries s = read_series(in, src);
      return "T=" + std::to_string(s.frames()) + " D=" + std::to_string(s.width());
    });
  }
  for (const auto& p : args.paths) {
    check("path", p, [](std::istream& in, const std::string& src) {
      const PathFile f = read_path(in, src);
      return "steps=" + std::to_string(f.result.path.steps.size());
    });
  }
  for (const auto& p : args.masks) {
    check("mask", p, [](std::istream& in, const std::string& src) {
      const Matrix m = read_mask(in, src);
      return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
    });
  }
  return failures == 0 ? kExitOk : kExitInput;
}

}  // namespace

// ---------------------------------------------------------------------------

DatasetManifest read_manifest(const fs::path& path) {
  const std::string text = read_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": invalid JSON: " + e.what());
  }
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + what);
  };
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    fail("expected an object with an 'entries' array");
  }
  DatasetManifest manifest;
  if (doc.contains("action")) {
    if (!doc["action"].is_string()) fail("'action' must be a string");
    manifest.action = doc["action"].get<std::string>();
  }

  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path resolved(p);
    if (resolved.is_relative()) resolved = base / resolved;
    if (!fs::exists(resolved)) throw Error(ErrorCode::kIo, "missing file " + resolved.string());
    return resolved;
  };

  std::set<std::string> ids;
  std::size_t index = 0;
  for (const auto& e : doc["entries"]) {
    const std::string where = "entry " + std::to_string(index++);
    if (!e.is_object()) fail(where + " must be an object");
    for (const char* key : {"videoId", "trackPath", "globalPath"}) {
      if (!e.contains(key) || !e[key].is_string()) fail(where + ": '" + key + "' must be a string");
    }
    ManifestEntry entry;
    entry.video_id = e["videoId"].get<std::string>();
    if (entry.video_id.empty() || entry.video_id.find_first_of("/\\") != std::string::npos) {
      fail(where + ": videoId must be non-empty and contain no path separators");
    }
    if (!ids.insert(entry.video_id).second) fail("duplicate videoId '" + entry.video_id + "'");
    entry.track_path = resolve(e["trackPath"].get<std::string>());
    entry.global_path = resolve(e["globalPath"].get<std::string>());
    if (e.contains("annotationPath") && !e["annotationPath"].is_null()) {
      if (!e["annotationPath"].is_string()) fail(where + ": 'annotationPath' must be a string");
      entry.annotation_path = resolve(e["annotationPath"].get<std::string>());
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"vidalign: video alignment with local/global feature series and diagonalized DTW"};
  app.set_config("--config", "", "Read option defaults from a TOML/INI file");
  app.require_subcommand(1);
  std::string log_path;
  app.add_option("--log", log_path, "Append a plain-text run log to this file");

  const std::vector<std::string> methods{"dtw", "ddtw", "trivial"};
  const std::vector<std::string> formats{"bin", "csv"};
  const auto seed_range = CLI::Range(std::uint64_t{0},
                                     static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()));

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build feature series from track and global files");
  build_cmd->add_option("--manifest", build.manifest, "Dataset manifest (JSON)")->required();
  build_cmd->add_option("--out-dir", build.out_dir, "Directory for series files")->required();
  build_cmd->add_option("--format", build.format, "Series file format")->check(CLI::IsMember(formats));
  build_cmd->add_option("--jobs", build.jobs, "Parallel workers")->check(CLI::PositiveNumber);

  MaskArgs mask;
  auto* mask_cmd = app.add_subcommand("mask", "Write the truncated Gaussian weight mask for a box");
  mask_cmd->add_option("--width", mask.width, "Frame width in pixels")->required()->check(CLI::PositiveNumber);
  mask_cmd->add_option("--height", mask.height, "Frame height in pixels")->required()->check(CLI::PositiveNumber);
  mask_cmd->add_option("--box", mask.box, "Subject box as cx,cy,w,h")->required();
  mask_cmd->add_option("--margin", mask.margin, "Pixels added to box width and height");
  mask_cmd->add_option("--drop", mask.drop, "Outside weight = boundary minimum - drop");
  mask_cmd->add_flag("--pixel-scale", mask.pixel_scale, "Use raw pixel offsets in the Gaussian");
  mask_cmd->add_flag("--text", mask.text, "Write the text format instead of binary");
  mask_cmd->add_option("--out", mask.out, "Output mask file")->required();

  AlignArgs align_args;
  auto* align_cmd = app.add_subcommand("align", "Align two series, or a list of pairs");
  align_cmd->add_option("--a", align_args.a, "First series file");
  align_cmd->add_option("--b", align_args.b, "Second series file");
  align_cmd->add_option("--out", align_args.out, "Path file (single pair)");
  align_cmd->add_option("--pairs", align_args.pairs, "Batch: text file of 'seriesA,seriesB' lines");
  align_cmd->add_option("--out-dir", align_args.out_dir, "Batch: directory for path files");
  align_cmd->add_option("--summary", align_args.summary, "Batch: summary CSV (default <out-dir>/summary.csv)");
  align_cmd->add_option("--method", align_args.method, "Alignment method")->check(CLI::IsMember(methods));
  align_cmd->add_option("--margin", align_args.margin, "DDTW margin in cells, or 'auto'");
  align_cmd->add_option("--lambda", align_args.lambda, "DDTW penalty coefficient");
  align_cmd->add_option("--jobs", align_args.jobs, "Parallel workers")->check(CLI::PositiveNumber);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score path files against phase annotations");
  eval_cmd->add_option("--path", eval_args.paths, "Path file(s)")->required();
  eval_cmd->add_option("--annotations", eval_args.annotations, "Annotation file (JSON lines)")->required();
  eval_cmd->add_option("--a-id", eval_args.a_id, "Override the first video id");
  eval_cmd->add_option("--b-id", eval_args.b_id, "Override the second video id");
  eval_cmd->add_option("--out", eval_args.out, "Report JSON (default: stdout)");
  eval_cmd->add_option("--summary", eval_args.summary, "Per-path CSV summary");

  ClassifyArgs classify;
  auto* classify_cmd = app.add_subcommand("classify", "Cross-validated per-frame phase classification");
  classify_cmd->add_option("--series", classify.series, "Series files")->required();
  classify_cmd->add_option("--annotations", classify.annotations, "Annotation file")->required();
  classify_cmd->add_option("--folds", classify.folds, "Number of folds")->check(CLI::Range(2, 1000000));
  classify_cmd->add_option("--k", classify.neighbors, "Neighbours in the k-NN vote")->check(CLI::PositiveNumber);
  classify_cmd->add_option("--seed", classify.seed, "Fold shuffle seed")->required()->check(seed_range);
  classify_cmd->add_option("--role", classify.role, "Train on the other folds or on the fold itself")
      ->check(CLI::IsMember({"others", "fold"}));
  classify_cmd->add_option("--out", classify.out, "Report JSON (default: stdout)");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic pair with ground truth");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->required()->check(seed_range);
  synth_cmd->add_option("--phases", synth.phases, "Phase count")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--durations-a", synth.durations_a, "Comma-separated phase durations of A");
  synth_cmd->add_option("--durations-b", synth.durations_b, "Comma-separated phase durations of B");
  synth_cmd->add_option("--min-duration", synth.min_duration, "Random duration lower bound");
  synth_cmd->add_option("--max-duration", synth.max_duration, "Random duration upper bound");
  synth_cmd->add_option("--noise", synth.noise, "Additive Gaussian noise std")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--dim", synth.dim, "Feature dimension")->check(CLI::PositiveNumber);
  synth_cmd->add_flag("--wait-phase", synth.wait_phase, "Prepend an idle phase to video B");
  synth_cmd->add_option("--wait-strategy", synth.wait_strategy, "Idle frame pattern")
      ->check(CLI::IsMember({"cycle", "hold"}));
  synth_cmd->add_option("--format", synth.format, "Series file format")->check(CLI::IsMember(formats));

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Synthetic trivial/DTW/DDTW comparison");
  bench_cmd->add_option("--suite", bench.suite, "Which suite to run")
      ->check(CLI::IsMember({"wait", "corridor", "all"}));
  bench_cmd->add_option("--pairs", bench.pairs, "Pairs per suite")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Experiment seed")->required()->check(seed_range);
  bench_cmd->add_option("--out", bench.out, "Result CSV")->required();
  bench_cmd->add_option("--jobs", bench.jobs, "Parallel workers")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--noise", bench.noise, "Additive Gaussian noise std")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--dim", bench.dim, "Feature dimension")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--margin", bench.margin, "DDTW margin in cells, or 'auto'");
  bench_cmd->add_option("--lambda", bench.lambda, "DDTW penalty coefficient")->check(CLI::NonNegativeNumber);
  bench_cmd->add_flag("--no-normalize", bench.no_normalize, "Skip per-series z-normalization");

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Check files against the input schemas");
  validate_cmd->add_option("--track", validate_args.tracks, "Track files");
  validate_cmd->add_option("--global", validate_args.globals, "Global feature files");
  validate_cmd->add_option("--annotations", validate_args.annotations, "Annotation files");
  validate_cmd->add_option("--series", validate_args.series, "Series files");
  validate_cmd->add_option("--path", validate_args.paths, "Path files");
  validate_cmd->add_option("--mask", validate_args.masks, "Mask files");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  RunLog log;
  try {
    log.open(log_path);
    std::string command_line;
    for (const auto& a : args) command_line += (command_line.empty() ? "" : " ") + a;
    log.line("run " + command_line);

    if (*build_cmd) return cmd_build(build, log, out, err);
    if (*mask_cmd) return cmd_mask(mask, log, out);
    if (*align_cmd) return cmd_align(align_args, log, out);
    if (*eval_cmd) return cmd_eval(eval_args, log, out);
    if (*classify_cmd) return cmd_classify(classify, log, out);
    if (*synth_cmd) return cmd_synth(synth, log, out);
    if (*bench_cmd) return cmd_benchmark(bench, log, out);
    if (*validate_cmd) return cmd_validate(validate_args, log, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    log.line(std::string("error ") + e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    log.line(std::string("failure ") + e.what());
    return kExitFailure;
  }
  return kExitInput;
}

}  // namespace vidalign::cli
