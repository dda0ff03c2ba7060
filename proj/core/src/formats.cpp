#include "vidalign/formats.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include <json.hpp>

#include "vidalign/error.hpp"

namespace vidalign {
namespace {

using Json = nlohmann::ordered_json;

constexpr char kSeriesMagic[8] = {'V', 'A', 'S', 'E', 'R', 'I', 'E', '1'};
constexpr char kMaskMagic[8] = {'V', 'A', 'M', 'A', 'S', 'K', 'F', '4'};
constexpr std::string_view kSeriesCsvPrefix = "#video_id=";
constexpr std::string_view kPathFormat = "vidalign-path-1";

[[noreturn]] void schema_error(std::string_view source, std::size_t line, const std::string& what) {
  std::string where(source);
  if (line > 0) where += ":" + std::to_string(line);
  throw Error(ErrorCode::kSchema, where + ": " + what);
}

template <typename T>
T byteswap_if_big(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t b = 0; b < sizeof(T) / 2; ++b) std::swap(bytes[b], bytes[sizeof(T) - 1 - b]);
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

template <typename T>
void put(std::ostream& out, T value) {
  value = byteswap_if_big(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, std::string_view source) {
  T value;
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    schema_error(source, 0, "truncated binary data");
  }
  return byteswap_if_big(value);
}

double number_field(const Json& obj, const char* key, std::string_view source, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    schema_error(source, line, std::string("field '") + key + "' must be a number");
  }
  return it->get<double>();
}

Json parse_json(std::string_view text, std::string_view source, std::size_t line) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    schema_error(source, line, std::string("invalid JSON: ") + e.what());
  }
}

// Non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> lines_of(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.emplace_back(number, line);
  }
  return out;
}

std::string read_all(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json point_json(const Point2& p) { return Json::array({p.x, p.y}); }

Point2 point_from(const Json& value, std::string_view source, std::size_t line, const char* what) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
    schema_error(source, line, std::string(what) + " must be an [x, y] pair of numbers");
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

std::size_t parse_size(std::string_view text, std::string_view source, std::size_t line) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    schema_error(source, line, "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kSchema, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

// ---------------------------------------------------------------------------

SubjectTrack read_track(std::istream& in, std::string_view source) {
  SubjectTrack track;
  for (const auto& [line, text] : lines_of(in)) {
    const Json record = parse_json(text, source, line);
    if (!record.is_object()) schema_error(source, line, "record must be a JSON object");

    const auto frame = record.find("frame");
    if (frame == record.end() || !frame->is_number_integer() ||
        frame->get<long long>() != static_cast<long long>(track.size() + 1)) {
      schema_error(source, line, "expected \"frame\": " + std::to_string(track.size() + 1));
    }

    TrackFrame entry;
    const auto box = record.find("box");
    if (box == record.end()) schema_error(source, line, "missing field 'box'");
    if (!box->is_null()) {
      if (!box->is_object()) schema_error(source, line, "'box' must be an object or null");
      Box b;
      b.center.x = number_field(*box, "cx", source, line);
      b.center.y = number_field(*box, "cy", source, line);
      b.width = number_field(*box, "w", source, line);
      b.height = number_field(*box, "h", source, line);
      if (!(b.width > 0.0) || !(b.height > 0.0)) {
        schema_error(source, line, "box width and height must be positive");
      }
      entry.box = b;
    }

    const auto pose = record.find("pose");
    if (pose == record.end()) schema_error(source, line, "missing field 'pose'");
    if (!pose->is_null()) {
      if (!pose->is_array() || pose->size() != kKeypointCount) {
        schema_error(source, line, "'pose' must hold exactly 24 keypoints or be null");
      }
      Pose p;
      for (std::size_t m = 0; m < kKeypointCount; ++m) {
        p[m] = point_from((*pose)[m], source, line, "keypoint");
      }
      entry.pose = p;
    }
    track.frames.push_back(entry);
  }
  return track;
}

void write_track(std::ostream& out, const SubjectTrack& track) {
  for (std::size_t t = 0; t < track.size(); ++t) {
    const TrackFrame& frame = track.frames[t];
    Json record;
    record["frame"] = t + 1;
    if (frame.box) {
      record["box"] = Json{{"cx", frame.box->center.x},
                           {"cy", frame.box->center.y},
                           {"w", frame.box->width},
                           {"h", frame.box->height}};
    } else {
      record["box"] = nullptr;
    }
    if (frame.pose) {
      Json pose = Json::array();
      for (const Point2& p : *frame.pose) pose.push_back(point_json(p));
      record["pose"] = std::move(pose);
    } else {
      record["pose"] = nullptr;
    }
    out << record.dump() << '\n';
  }
}

GlobalFeatures read_global(std::istream& in, std::string_view source) {
  std::vector<double> values;
  std::size_t frames = 0;
  for (const auto& [line, text] : lines_of(in)) {
    const Json record = parse_json(text, source, line);
    if (!record.is_object()) schema_error(source, line, "record must be a JSON object");
    const auto frame = record.find("frame");
    if (frame == record.end() || !frame->is_number_integer() ||
        frame->get<long long>() != static_cast<long long>(frames + 1)) {
      schema_error(source, line, "expected \"frame\": " + std::to_string(frames + 1));
    }
    const auto global = record.find("global");
    if (global == record.end() || !global->is_array() || global->size() != kGlobalDims) {
      schema_error(source, line, "'global' must be an array of exactly 64 numbers");
    }
    for (const auto& v : *global) {
      if (!v.is_number()) schema_error(source, line, "'global' must contain numbers only");
      values.push_back(v.get<double>());
    }
    ++frames;
  }
  Matrix out(frames, kGlobalDims);
  std::copy(values.begin(), values.end(), out.data().begin());
  return out;
}

void write_global(std::ostream& out, const GlobalFeatures& global) {
  if (global.cols() != kGlobalDims) {
    throw Error(ErrorCode::kDimMismatch, "global features must be 64 wide");
  }
  for (std::size_t t = 0; t < global.rows(); ++t) {
    Json record;
    record["frame"] = t + 1;
    record["global"] = Json(std::vector<double>(global.row(t).begin(), global.row(t).end()));
    out << record.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------

void write_series(std::ostream& out, const FeatureSeries& series, SeriesFormat format) {
  if (format == SeriesFormat::kBinary) {
    out.write(kSeriesMagic, sizeof(kSeriesMagic));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(series.frames()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(series.width()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(series.video_id.size()));
    out.write(series.video_id.data(), static_cast<std::streamsize>(series.video_id.size()));
    for (double v : series.values.data()) put<double>(out, v);
    return;
  }
  if (series.video_id.find_first_of("\r\n") != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "video id with a line break cannot be written as CSV");
  }
  out << kSeriesCsvPrefix << series.video_id << '\n';
  for (std::size_t t = 0; t < series.frames(); ++t) {
    const auto row = series.values.row(t);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      out << format_double(row[c]);
    }
    out << '\n';
  }
}

FeatureSeries read_series(std::istream& in, std::string_view source) {
  const std::string bytes = read_all(in);
  FeatureSeries series;

  if (bytes.size() >= sizeof(kSeriesMagic) &&
      std::memcmp(bytes.data(), kSeriesMagic, sizeof(kSeriesMagic)) == 0) {
    std::istringstream body(bytes.substr(sizeof(kSeriesMagic)));
    const auto frames = get<std::uint32_t>(body, source);
    const auto width = get<std::uint32_t>(body, source);
    const auto id_length = get<std::uint32_t>(body, source);
    series.video_id.resize(id_length);
    if (!body.read(series.video_id.data(), id_length)) schema_error(source, 0, "truncated video id");
    const std::size_t expected = sizeof(kSeriesMagic) + 12 + id_length +
                                 static_cast<std::size_t>(frames) * width * sizeof(double);
    if (bytes.size() != expected) {
      schema_error(source, 0, "binary series holds " + std::to_string(bytes.size()) +
                                  " bytes, header implies " + std::to_string(expected));
    }
    series.values = Matrix(frames, width);
    for (double& v : series.values.data()) v = get<double>(body, source);
    return series;
  }

  std::istringstream text(bytes);
  const auto lines = lines_of(text);
  if (lines.empty() || !lines.front().second.starts_with(kSeriesCsvPrefix)) {
    schema_error(source, 1, "not a series file (expected binary magic or '#video_id=' header)");
  }
  series.video_id = lines.front().second.substr(kSeriesCsvPrefix.size());
  std::vector<double> values;
  std::size_t width = 0;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [line, row] = lines[r];
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      const std::string_view cell =
          std::string_view(row).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      try {
        values.push_back(parse_double(cell));
      } catch (const Error&) {
        schema_error(source, line, "bad number '" + std::string(cell) + "'");
      }
      ++count;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (r == 1) width = count;
    if (count != width) {
      schema_error(source, line, "row has " + std::to_string(count) + " values, expected " +
                                     std::to_string(width));
    }
  }
  series.values = Matrix(lines.size() - 1, width);
  std::copy(values.begin(), values.end(), series.values.data().begin());
  return series;
}

// ---------------------------------------------------------------------------

void write_path(std::ostream& out, const PathFile& file) {
  const AlignmentResult& r = file.result;
  out << "#format=" << kPathFormat << '\n'
      << "#a=" << file.video_a << '\n'
      << "#b=" << file.video_b << '\n'
      << "#n=" << file.n << '\n'
      << "#k=" << file.k << '\n'
      << "#method=" << to_string(r.method) << '\n'
      << "#margin=" << format_double(r.margin) << '\n'
      << "#lambda=" << format_double(r.lambda) << '\n'
      << "#total_cost=" << format_double(r.total_cost) << '\n';
  for (const PathStep& s : r.path.steps) out << s.i << ',' << s.j << '\n';
}

PathFile read_path(std::istream& in, std::string_view source) {
  std::map<std::string, std::string, std::less<>> header;
  PathFile file;
  for (const auto& [line, text] : lines_of(in)) {
    if (text.starts_with('#')) {
      const std::size_t eq = text.find('=');
      if (eq == std::string::npos) schema_error(source, line, "header line needs key=value");
      header[text.substr(1, eq - 1)] = text.substr(eq + 1);
      continue;
    }
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos) schema_error(source, line, "step must be 'i,j'");
    const auto i = parse_size(std::string_view(text).substr(0, comma), source, line);
    const auto j = parse_size(std::string_view(text).substr(comma + 1), source, line);
    file.result.path.steps.push_back({static_cast<int>(i), static_cast<int>(j)});
  }

  auto field = [&](const char* key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) schema_error(source, 0, std::string("missing header '#") + key + "='");
    return it->second;
  };
  if (field("format") != kPathFormat) schema_error(source, 1, "unsupported path format");
  file.video_a = field("a");
  file.video_b = field("b");
  file.n = parse_size(field("n"), source, 0);
  file.k = parse_size(field("k"), source, 0);
  try {
    file.result.method = parse_align_method(field("method"));
    file.result.margin = parse_double(field("margin"));
    file.result.lambda = parse_double(field("lambda"));
    file.result.total_cost = parse_double(field("total_cost"));
  } catch (const Error& e) {
    schema_error(source, 0, e.what());
  }
  if (!is_valid_path(file.result.path, file.n, file.k)) {
    schema_error(source, 0, "steps do not form a monotone path from (1,1) to (n,k)");
  }
  return file;
}

// ---------------------------------------------------------------------------

std::vector<PhaseAnnotation> read_annotations(std::istream& in, std::string_view source) {
  std::vector<PhaseAnnotation> out;
  std::set<std::string, std::less<>> seen;
  for (const auto& [line, text] : lines_of(in)) {
    const Json record = parse_json(text, source, line);
    if (!record.is_object()) schema_error(source, line, "record must be a JSON object");
    const auto id = record.find("videoId");
    if (id == record.end() || !id->is_string()) schema_error(source, line, "'videoId' must be a string");
    const auto phases = record.find("phases");
    if (phases == record.end() || !phases->is_array()) {
      schema_error(source, line, "'phases' must be an array of integers");
    }
    PhaseAnnotation annotation;
    annotation.video_id = id->get<std::string>();
    for (const auto& p : *phases) {
      if (!p.is_number_integer()) schema_error(source, line, "'phases' must contain integers only");
      annotation.phases.push_back(p.get<int>());
    }
    try {
      validate(annotation);
    } catch (const Error& e) {
      schema_error(source, line, e.what());
    }
    if (!seen.insert(annotation.video_id).second) {
      schema_error(source, line, "duplicate videoId '" + annotation.video_id + "'");
    }
    out.push_back(std::move(annotation));
  }
  return out;
}

void write_annotations(std::ostream& out, const std::vector<PhaseAnnotation>& annotations) {
  for (const auto& a : annotations) {
    Json record;
    record["videoId"] = a.video_id;
    record["phases"] = a.phases;
    out << record.dump() << '\n';
  }
}

void write_ground_truth(std::ostream& out, const GroundTruthFile& file) {
  Json anchors = Json::array();
  for (const Point2& p : file.path.anchors) anchors.push_back(point_json(p));
  Json doc;
  doc["n"] = file.n;
  doc["k"] = file.k;
  doc["anchors"] = std::move(anchors);
  out << doc.dump() << '\n';
}

GroundTruthFile read_ground_truth(std::istream& in, std::string_view source) {
  const Json doc = parse_json(read_all(in), source, 1);
  GroundTruthFile file;
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("k") || !doc.contains("anchors") ||
      !doc["n"].is_number_unsigned() || !doc["k"].is_number_unsigned() ||
      !doc["anchors"].is_array()) {
    schema_error(source, 1, "expected {\"n\":int,\"k\":int,\"anchors\":[[x,y],...]}");
  }
  file.n = doc["n"].get<std::size_t>();
  file.k = doc["k"].get<std::size_t>();
  for (const auto& a : doc["anchors"]) file.path.anchors.push_back(point_from(a, source, 1, "anchor"));
  return file;
}

// ---------------------------------------------------------------------------

void write_report(std::ostream& out, const ReportFile& file) {
  auto metric = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json config = Json::object();
  for (const auto& [key, value] : file.config) {
    std::visit([&](const auto& v) { config[key] = v; }, value);
  }
  Json doc;
  doc["eae"] = metric(file.report.eae);
  doc["correctPhaseRate"] = metric(file.report.correct_phase_rate);
  doc["accuracy"] = metric(file.report.classification_accuracy);
  doc["config"] = std::move(config);
  out << doc.dump(2) << '\n';
}

ReportFile read_report(std::istream& in, std::string_view source) {
  const Json doc = parse_json(read_all(in), source, 1);
  if (!doc.is_object()) schema_error(source, 1, "report must be a JSON object");
  auto metric = [&](const char* key) -> std::optional<double> {
    const auto it = doc.find(key);
    if (it == doc.end()) schema_error(source, 1, std::string("missing field '") + key + "'");
    if (it->is_null()) return std::nullopt;
    if (!it->is_number()) schema_error(source, 1, std::string("'") + key + "' must be a number or null");
    return it->get<double>();
  };
  ReportFile file;
  file.report.eae = metric("eae");
  file.report.correct_phase_rate = metric("correctPhaseRate");
  file.report.classification_accuracy = metric("accuracy");

  const auto config = doc.find("config");
  if (config != doc.end()) {
    if (!config->is_object()) schema_error(source, 1, "'config' must be an object");
    for (const auto& [key, value] : config->items()) {
      if (value.is_boolean()) {
        file.config.emplace_back(key, value.get<bool>());
      } else if (value.is_number_integer()) {
        file.config.emplace_back(key, value.get<std::int64_t>());
      } else if (value.is_number_float()) {
        file.config.emplace_back(key, value.get<double>());
      } else if (value.is_string()) {
        file.config.emplace_back(key, value.get<std::string>());
      } else {
        schema_error(source, 1, "config value '" + key + "' must be a scalar");
      }
    }
  }
  return file;
}

// ---------------------------------------------------------------------------

void write_mask(std::ostream& out, const Matrix& mask, bool text) {
  if (text) {
    out << mask.rows() << ' ' << mask.cols() << '\n';
    char buffer[32];
    for (std::size_t y = 0; y < mask.rows(); ++y) {
      for (std::size_t x = 0; x < mask.cols(); ++x) {
        const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), static_cast<float>(mask(y, x)));
        if (x > 0) out << ' ';
        out.write(buffer, ptr - buffer);
      }
      out << '\n';
    }
    return;
  }
  out.write(kMaskMagic, sizeof(kMaskMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(mask.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(mask.cols()));
  for (double v : mask.data()) put<float>(out, static_cast<float>(v));
}

Matrix read_mask(std::istream& in, std::string_view source) {
  const std::string bytes = read_all(in);
  if (bytes.size() >= sizeof(kMaskMagic) && std::memcmp(bytes.data(), kMaskMagic, sizeof(kMaskMagic)) == 0) {
    std::istringstream body(bytes.substr(sizeof(kMaskMagic)));
    const auto rows = get<std::uint32_t>(body, source);
    const auto cols = get<std::uint32_t>(body, source);
    if (bytes.size() != 16 + static_cast<std::size_t>(rows) * cols * sizeof(float)) {
      schema_error(source, 0, "mask size does not match its header");
    }
    Matrix out(rows, cols);
    for (double& v : out.data()) v = get<float>(body, source);
    return out;
  }
  std::istringstream text(bytes);
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(text >> rows >> cols)) schema_error(source, 1, "mask text must start with 'H W'");
  Matrix out(rows, cols);
  for (double& v : out.data()) {
    std::string token;
    if (!(text >> token)) schema_error(source, 0, "mask text has too few values");
    try {
      v = static_cast<float>(parse_double(token));
    } catch (const Error&) {
      schema_error(source, 0, "bad mask value '" + token + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_all(in);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move output into place at " + path.string());
  }
}

}  // namespace vidalign
