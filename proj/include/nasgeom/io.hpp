#pragma once

// File formats and records:
//   FMAT     "FMAT" + version 1, u32 rows, u32 cols (LE), rows*cols f64 LE
//            row-major, then optionally u8 flag (1) + rows u16 labels.
//   CSV      header row, comma-separated values, optional trailing "label" column.
//   CIFAR-10 binary batches: records of 1 label byte + 3072 pixel bytes.
//   JSON     ArchScore records with an embedded run manifest, "schema": 1.

#include <bit>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "feature_matrix.hpp"
#include "network.hpp"
#include "pipeline.hpp"
#include "rng.hpp"

namespace nasgeom::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kCifarRecord = 3073;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temp file and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(hash_combine(std::chrono::steady_clock::now().time_since_epoch().count(),
                                              std::hash<std::string>{}(path.string())) %
                                 1000000);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

/// 64-bit FNV-1a digest of file contents, hex.
inline std::string digest_hex(std::string_view bytes) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << hash_string(bytes);
  return os.str();
}

// ---------------------------------------------------------------------------
// FMAT
// ---------------------------------------------------------------------------

namespace detail {

inline void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_le(std::string_view in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + static_cast<std::size_t>(i)])) << (8 * i);
  return v;
}

}  // namespace detail

inline std::string encode_fmat(const FeatureMatrix& m) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() || m.cols() > std::numeric_limits<std::uint32_t>::max())
    throw FormatError("fmat: matrix too large");
  if (m.has_labels() && static_cast<Eigen::Index>(m.labels.size()) != m.rows()) throw FormatError("fmat: label count mismatch");
  std::string out = "FMAT";
  out.push_back(1);
  detail::put_le(out, static_cast<std::uint64_t>(m.rows()), 4);
  detail::put_le(out, static_cast<std::uint64_t>(m.cols()), 4);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) detail::put_le(out, std::bit_cast<std::uint64_t>(m.values(i, j)), 8);
  if (m.has_labels()) {
    out.push_back(1);
    for (int label : m.labels) {
      if (label < 0 || label > 0xFFFF) throw FormatError("fmat: label out of u16 range");
      detail::put_le(out, static_cast<std::uint64_t>(label), 2);
    }
  }
  return out;
}

inline FeatureMatrix decode_fmat(std::string_view bytes) {
  constexpr std::size_t header = 4 + 1 + 4 + 4;
  if (bytes.size() < header) throw FormatError("fmat: file shorter than header (" + std::to_string(bytes.size()) + " bytes)");
  if (bytes.substr(0, 4) != "FMAT") throw FormatError("fmat: bad magic");
  if (static_cast<unsigned char>(bytes[4]) != 1) throw FormatError("fmat: unsupported version " + std::to_string(static_cast<unsigned char>(bytes[4])));
  const auto rows = detail::get_le(bytes, 5, 4);
  const auto cols = detail::get_le(bytes, 9, 4);
  const std::size_t body = header + static_cast<std::size_t>(rows * cols * 8);
  const std::size_t labeled = body + 1 + static_cast<std::size_t>(rows) * 2;
  bool has_labels = false;
  if (bytes.size() == body + 1 && bytes[body] == 0) {
  } else if (bytes.size() == labeled && bytes[body] == 1) {
    has_labels = true;
  } else if (bytes.size() != body) {
    throw FormatError("fmat: length " + std::to_string(bytes.size()) + " does not match header (" + std::to_string(rows) +
                      "x" + std::to_string(cols) + " expects " + std::to_string(body) + " or " + std::to_string(labeled) + ")");
  }
  FeatureMatrix m{Matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols))};
  std::size_t at = header;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j, at += 8) m.values(i, j) = std::bit_cast<double>(detail::get_le(bytes, at, 8));
  if (has_labels) {
    at = body + 1;
    for (std::uint64_t i = 0; i < rows; ++i, at += 2) m.labels.push_back(static_cast<int>(detail::get_le(bytes, at, 2)));
  }
  return m;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline FeatureMatrix decode_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw FormatError("csv: empty input");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  if (!header.empty() && !header.back().empty() && header.back().back() == '\r') header.back().pop_back();
  const bool labeled = !header.empty() && header.back() == "label";
  const std::size_t width = header.size() - (labeled ? 1 : 0);
  if (width == 0) throw FormatError("csv: no feature columns");
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream r(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(r, cell, ',')) {
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
      while (last > first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
      std::from_chars_result parsed{first, std::errc::invalid_argument};
      if (col < width) {
        double v = 0.0;
        parsed = std::from_chars(first, last, v);
        values.push_back(v);
      } else if (labeled && col == width) {
        int v = 0;
        parsed = std::from_chars(first, last, v);
        labels.push_back(v);
      }
      if (parsed.ec != std::errc{} || parsed.ptr != last || first == last)
        throw FormatError("csv: bad cell '" + cell + "' at data row " + std::to_string(rows + 1));
      ++col;
    }
    if (col != header.size()) throw FormatError("csv: row " + std::to_string(rows + 1) + " has " + std::to_string(col) + " cells, expected " + std::to_string(header.size()));
    ++rows;
  }
  if (rows == 0) throw FormatError("csv: no data rows");
  FeatureMatrix m{Matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width)), labels};
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < width; ++j) m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * width + j];
  return m;
}

inline std::string encode_csv(const FeatureMatrix& m) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << "f" << j;
  if (m.has_labels()) os << ",label";
  os << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m.values(i, j);
    if (m.has_labels()) os << "," << m.labels[static_cast<std::size_t>(i)];
    os << "\n";
  }
  return os.str();
}

/// FMAT or CSV, chosen by the ".csv" extension.
inline FeatureMatrix read_features(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  FeatureMatrix m = path.extension() == ".csv" ? decode_csv(bytes) : decode_fmat(bytes);
  m.validate();
  return m;
}

inline void write_features(const std::filesystem::path& path, const FeatureMatrix& m) {
  write_file_atomic(path, path.extension() == ".csv" ? encode_csv(m) : encode_fmat(m));
}

// ---------------------------------------------------------------------------
// CIFAR-10 binary
// ---------------------------------------------------------------------------

inline ImageBatch decode_cifar(std::string_view bytes) {
  if (bytes.empty() || bytes.size() % kCifarRecord != 0)
    throw FormatError("cifar: file length " + std::to_string(bytes.size()) + " is not a positive multiple of the record size " +
                      std::to_string(kCifarRecord));
  const int count = static_cast<int>(bytes.size() / kCifarRecord);
  ImageBatch batch;
  batch.images = Tensor(count, 3, 32, 32);
  for (int i = 0; i < count; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * kCifarRecord;
    batch.labels.push_back(static_cast<unsigned char>(bytes[base]));
    double* dst = batch.images.sample(i);
    for (std::size_t p = 0; p < 3072; ++p) dst[p] = static_cast<unsigned char>(bytes[base + 1 + p]) / 255.0;
  }
  return batch;
}

/// Quantizes [0,1] images of shape 3x32x32 to CIFAR-10 records.
inline std::string encode_cifar(const ImageBatch& batch) {
  const Tensor& t = batch.images;
  if (t.c != 3 || t.h != 32 || t.w != 32) throw FormatError("cifar: images must be 3x32x32");
  std::string out;
  out.reserve(static_cast<std::size_t>(t.n) * kCifarRecord);
  for (int i = 0; i < t.n; ++i) {
    out.push_back(static_cast<char>(batch.labels.empty() ? 0 : batch.labels[static_cast<std::size_t>(i)]));
    const double* src = t.sample(i);
    for (std::size_t p = 0; p < 3072; ++p)
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(src[p], 0.0, 1.0) * 255.0))));
  }
  return out;
}

inline ImageBatch read_cifar(const std::vector<std::filesystem::path>& paths) {
  std::vector<ImageBatch> parts;
  int total = 0;
  for (const auto& p : paths) {
    try {
      parts.push_back(decode_cifar(read_file(p)));
    } catch (const FormatError& e) {
      throw FormatError(p.string() + ": " + e.what());
    }
    total += parts.back().images.n;
  }
  if (parts.size() == 1) return std::move(parts.front());
  ImageBatch all;
  all.images = Tensor(total, 3, 32, 32);
  int at = 0;
  for (const auto& part : parts) {
    std::copy(part.images.data.begin(), part.images.data.end(), all.images.sample(at));
    all.labels.insert(all.labels.end(), part.labels.begin(), part.labels.end());
    at += part.images.n;
  }
  return all;
}

// ---------------------------------------------------------------------------
// JSON records
// ---------------------------------------------------------------------------

namespace detail {

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline double number_or_nan(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

}  // namespace detail

inline json to_json(const MeasureStat& s) {
  json per = json::array();
  for (double v : s.per_init) per.push_back(detail::number_or_null(v));
  json j = {{"mean", detail::number_or_null(s.mean)}, {"std", detail::number_or_null(s.std)}, {"per_init", per}};
  if (!s.errors.empty()) j["errors"] = s.errors;
  if (!s.warnings.empty()) j["warnings"] = s.warnings;
  return j;
}

inline MeasureStat measure_stat_from_json(const json& j) {
  MeasureStat s;
  s.mean = detail::number_or_nan(j.at("mean"));
  s.std = detail::number_or_nan(j.at("std"));
  for (const auto& v : j.value("per_init", json::array())) s.per_init.push_back(detail::number_or_nan(v));
  if (j.contains("errors")) s.errors = j["errors"].get<std::vector<std::string>>();
  if (j.contains("warnings")) s.warnings = j["warnings"].get<std::vector<std::string>>();
  return s;
}

inline json to_json(const ArchScore& s) {
  json measures = json::object();
  for (const auto& [name, stat] : s.measures) measures[name] = to_json(stat);
  json prov = {{"master_seed", s.provenance.master_seed},
               {"init_seeds", s.provenance.init_seeds},
               {"batch_ids", s.provenance.batch_ids},
               {"config_hash", s.provenance.config_hash},
               {"data_source", s.provenance.data_source}};
  json j = {{"arch", s.arch}, {"measures", measures}, {"verdicts", s.verdicts}, {"provenance", prov}};
  if (!s.init_errors.empty()) j["init_errors"] = s.init_errors;
  return j;
}

inline ArchScore arch_score_from_json(const json& j) {
  ArchScore s;
  s.arch = j.at("arch").get<std::string>();
  for (const auto& [name, m] : j.at("measures").items()) s.measures[name] = measure_stat_from_json(m);
  if (j.contains("verdicts")) s.verdicts = j["verdicts"].get<std::map<std::string, bool>>();
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    s.provenance.master_seed = p.value("master_seed", std::uint64_t{0});
    s.provenance.init_seeds = p.value("init_seeds", std::vector<std::uint64_t>{});
    s.provenance.batch_ids = p.value("batch_ids", std::vector<std::uint64_t>{});
    s.provenance.config_hash = p.value("config_hash", std::uint64_t{0});
    s.provenance.data_source = p.value("data_source", std::string{});
  }
  if (j.contains("init_errors")) s.init_errors = j["init_errors"].get<std::vector<std::string>>();
  return s;
}

struct RunManifest {
  std::string command;
  std::uint64_t master_seed = 0;
  std::uint64_t config_hash = 0;
  std::string config;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
  std::string created;  // UTC ISO-8601

  static std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }
};

inline json to_json(const RunManifest& m) {
  json inputs = json::array();
  for (const auto& [path, digest] : m.inputs) inputs.push_back({{"path", path}, {"digest", digest}});
  return {{"toolkit", "nasgeom"},     {"version", std::string(kVersion)}, {"command", m.command},
          {"master_seed", m.master_seed}, {"config_hash", m.config_hash},   {"config", m.config},
          {"inputs", inputs},         {"created", m.created}};
}

/// {"schema": 1, "manifest": ..., "scores": [...]}
inline json score_record(const std::vector<ArchScore>& scores, const RunManifest& manifest) {
  json arr = json::array();
  for (const auto& s : scores) arr.push_back(to_json(s));
  return {{"schema", kSchemaVersion}, {"manifest", to_json(manifest)}, {"scores", arr}};
}

/// Scores from a record, or from a bare ArchScore object.
inline std::vector<ArchScore> scores_from_record(const json& j) {
  std::vector<ArchScore> out;
  if (j.contains("scores")) {
    if (j.value("schema", 0) != kSchemaVersion) throw FormatError("unsupported record schema");
    for (const auto& s : j["scores"]) out.push_back(arch_score_from_json(s));
  } else if (j.contains("arch")) {
    out.push_back(arch_score_from_json(j));
  } else {
    throw FormatError("JSON is neither a score record nor an ArchScore");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rule files
// ---------------------------------------------------------------------------

/// {"name": "...", "rules": [{"measure": "fishers", "intervals": [[lo, hi], ...], "polarity": "keep"}]}
/// null bounds mean unbounded.
inline RuleSet rule_set_from_json(const json& j) {
  RuleSet rs;
  rs.name = j.value("name", std::string("custom"));
  for (const auto& r : j.at("rules")) {
    FilterRule rule;
    rule.measure = r.at("measure").get<std::string>();
    const std::string polarity = r.value("polarity", std::string("keep"));
    if (polarity != "keep" && polarity != "drop") throw FormatError("rule polarity must be keep or drop");
    rule.polarity = polarity == "keep" ? Polarity::keep : Polarity::drop;
    for (const auto& iv : r.at("intervals")) {
      if (!iv.is_array() || iv.size() != 2) throw FormatError("rule interval must be [lo, hi]");
      Interval interval;
      if (!iv[0].is_null()) interval.lo = iv[0].get<double>();
      if (!iv[1].is_null()) interval.hi = iv[1].get<double>();
      rule.intervals.push_back(interval);
    }
    rule.validate();
    rs.rules.push_back(rule);
  }
  return rs;
}

// ---------------------------------------------------------------------------
// CSV score tables
// ---------------------------------------------------------------------------

/// arch, <measure>_mean, <measure>_std..., then keep/drop per rule set.
inline std::string scores_csv(const std::vector<ArchScore>& scores, const std::vector<RuleSet>& rule_sets) {
  std::vector<std::string> measures;
  for (const auto& name : all_measure_names()) {
    bool present = false;
    for (const auto& s : scores) present = present || s.measures.count(name) > 0;
    if (present) measures.push_back(name);
  }
  std::ostringstream os;
  os.precision(10);
  os << "arch";
  for (const auto& m : measures) os << "," << m << "_mean," << m << "_std";
  for (const auto& rs : rule_sets) os << "," << rs.name;
  os << "\n";
  for (const auto& s : scores) {
    os << '"' << s.arch << '"';
    for (const auto& m : measures) {
      const auto it = s.measures.find(m);
      auto cell = [&](double v) {
        os << ",";
        if (std::isfinite(v)) os << v;
      };
      if (it == s.measures.end()) {
        os << ",,";
      } else {
        cell(it->second.mean);
        cell(it->second.std);
      }
    }
    for (const auto& rs : rule_sets) os << "," << (apply_rules(s, rs).keep ? "keep" : "drop");
    os << "\n";
  }
  return os.str();
}

}  // namespace nasgeom::io
