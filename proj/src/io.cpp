// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include "smokefilter/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "smokefilter/errors.hpp"

namespace smokefilter {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& token, const std::string& where) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw DataError(where + ": cannot parse number '" + token + "'");
  return v;
}

// PCD fields are F4: round through float so ascii and binary agree.
double parse_float(const std::string& token, const std::string& where) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const float v = std::strtof(begin, &end);
  if (end == begin || *end != '\0') throw DataError(where + ": cannot parse number '" + token + "'");
  return static_cast<double>(v);
}

void check_point(const Point& p, std::size_t row, const std::string& source) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
    throw DataError(source + ": row " + std::to_string(row) + " has a non-finite coordinate");
  }
  if (!std::isfinite(p.intensity) || p.intensity < 0.0) {
    throw DataError(source + ": row " + std::to_string(row) + " has an invalid intensity");
  }
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw DataError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw DataError("failed writing " + path.string());
}

float read_le_float(const char* bytes) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, bytes, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

void write_le_float(std::ostream& out, float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  char bytes[4];
  std::memcpy(bytes, &bits, sizeof bits);
  out.write(bytes, sizeof bytes);
}

}  // namespace

CloudFormat parse_format(std::string_view name) {
  const std::string n = lower(name);
  if (n == "pcd-ascii") return CloudFormat::pcd_ascii;
  if (n == "pcd-binary" || n == "pcd") return CloudFormat::pcd_binary;
  if (n == "csv") return CloudFormat::csv;
  throw ParameterError("unknown cloud format '" + std::string(name) + "' (expected pcd-ascii, pcd-binary or csv)");
}

std::string format_name(CloudFormat format) {
  switch (format) {
    case CloudFormat::pcd_ascii:
      return "pcd-ascii";
    case CloudFormat::pcd_binary:
      return "pcd-binary";
    case CloudFormat::csv:
      return "csv";
  }
  return "unknown";
}

CloudFormat format_for_path(const std::filesystem::path& path) {
  return lower(path.extension().string()) == ".csv" ? CloudFormat::csv : CloudFormat::pcd_binary;
}

// ---------------------------------------------------------------------------
// PCD

PointCloud read_pcd(std::istream& in, const std::string& source) {
  std::vector<std::string> fields;
  std::vector<int> sizes;
  std::vector<char> types;
  std::vector<int> counts;
  std::optional<std::size_t> width, height, points;
  std::string data;

  std::string line;
  std::size_t line_no = 0;
  while (data.empty() && std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ss(t);
    std::string key;
    ss >> key;
    const std::string where = source + ": header line " + std::to_string(line_no);
    if (key == "VERSION" || key == "VIEWPOINT") continue;
    if (key == "FIELDS") {
      for (std::string f; ss >> f;) fields.push_back(lower(f));
    } else if (key == "SIZE") {
      for (std::string s; ss >> s;) sizes.push_back(static_cast<int>(parse_number(s, where)));
    } else if (key == "TYPE") {
      for (std::string s; ss >> s;) types.push_back(s.size() == 1 ? s[0] : '?');
    } else if (key == "COUNT") {
      for (std::string s; ss >> s;) counts.push_back(static_cast<int>(parse_number(s, where)));
    } else if (key == "WIDTH" || key == "HEIGHT" || key == "POINTS") {
      std::string s;
      ss >> s;
      const double v = parse_number(s, where);
      if (v < 0 || v != std::floor(v)) throw DataError(where + ": " + key + " must be a non-negative integer");
      (key == "WIDTH" ? width : key == "HEIGHT" ? height : points) = static_cast<std::size_t>(v);
    } else if (key == "DATA") {
      ss >> data;
      if (data != "ascii" && data != "binary") throw DataError(where + ": unsupported DATA '" + data + "'");
    } else {
      throw DataError(where + ": unknown header key '" + key + "'");
    }
  }
  if (data.empty()) throw DataError(source + ": missing DATA line");
  if (fields.empty()) throw DataError(source + ": missing FIELDS line");
  if (counts.empty()) counts.assign(fields.size(), 1);
  if (sizes.size() != fields.size() || types.size() != fields.size() || counts.size() != fields.size()) {
    throw DataError(source + ": FIELDS, SIZE, TYPE and COUNT disagree in length");
  }
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (sizes[f] != 4 || types[f] != 'F' || counts[f] != 1) {
      throw DataError(source + ": field '" + fields[f] + "' is not a single F4 value");
    }
  }
  auto column = [&](const char* name) {
    const auto it = std::find(fields.begin(), fields.end(), name);
    if (it == fields.end()) throw DataError(source + ": missing field '" + name + "'");
    return static_cast<std::size_t>(it - fields.begin());
  };
  const std::array<std::size_t, 4> col{column("x"), column("y"), column("z"), column("intensity")};

  if (!points && !width) throw DataError(source + ": missing POINTS/WIDTH");
  const std::size_t n = points ? *points : *width * height.value_or(1);
  if (width && *width * height.value_or(1) != n) throw DataError(source + ": WIDTH * HEIGHT does not match POINTS");

  PointCloud cloud;
  cloud.points.reserve(n);
  if (data == "ascii") {
    std::size_t row = 0;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (row == n) throw DataError(source + ": more data rows than the declared " + std::to_string(n));
      std::istringstream ss(t);
      std::vector<std::string> tokens;
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      const std::string where = source + ": row " + std::to_string(row);
      if (tokens.size() != fields.size()) throw DataError(where + ": expected " + std::to_string(fields.size()) + " values");
      Point p{parse_float(tokens[col[0]], where), parse_float(tokens[col[1]], where),
              parse_float(tokens[col[2]], where), parse_float(tokens[col[3]], where)};
      check_point(p, row, source);
      cloud.points.push_back(p);
      ++row;
    }
    if (row != n) {
      throw DataError(source + ": declared " + std::to_string(n) + " points, found " + std::to_string(row));
    }
  } else {
    const std::size_t stride = 4 * fields.size();
    std::vector<char> buffer(n * stride);
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (static_cast<std::size_t>(in.gcount()) != buffer.size()) {
      throw DataError(source + ": declared " + std::to_string(n) + " points, found " +
                      std::to_string(static_cast<std::size_t>(in.gcount()) / stride));
    }
    for (std::size_t row = 0; row < n; ++row) {
      const char* base = buffer.data() + row * stride;
      Point p{read_le_float(base + 4 * col[0]), read_le_float(base + 4 * col[1]), read_le_float(base + 4 * col[2]),
              read_le_float(base + 4 * col[3])};
      check_point(p, row, source);
      cloud.points.push_back(p);
    }
  }
  return cloud;
}

void write_pcd(const PointCloud& cloud, std::ostream& out, bool binary) {
  const std::size_t n = cloud.size();
  out << "# .PCD v0.7 - Point Cloud Data file format\n"
      << "VERSION 0.7\n"
      << "FIELDS x y z intensity\n"
      << "SIZE 4 4 4 4\n"
      << "TYPE F F F F\n"
      << "COUNT 1 1 1 1\n"
      << "WIDTH " << n << "\n"
      << "HEIGHT 1\n"
      << "VIEWPOINT 0 0 0 1 0 0 0\n"
      << "POINTS " << n << "\n"
      << "DATA " << (binary ? "binary" : "ascii") << "\n";
  if (binary) {
    for (const Point& p : cloud.points) {
      write_le_float(out, static_cast<float>(p.x));
      write_le_float(out, static_cast<float>(p.y));
      write_le_float(out, static_cast<float>(p.z));
      write_le_float(out, static_cast<float>(p.intensity));
    }
    return;
  }
  char buf[128];
  for (const Point& p : cloud.points) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g %.9g\n", static_cast<double>(static_cast<float>(p.x)),
                  static_cast<double>(static_cast<float>(p.y)), static_cast<double>(static_cast<float>(p.z)),
                  static_cast<double>(static_cast<float>(p.intensity)));
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// CSV

PointCloud read_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": missing header row");
  std::vector<std::string> header = split_csv(line);
  for (auto& h : header) h = lower(h);
  auto column = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(source + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::array<std::size_t, 4> col{column("x"), column("y"), column("z"), column("intensity")};

  PointCloud cloud;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    const std::string where = source + ": row " + std::to_string(row);
    if (cells.size() != header.size()) throw DataError(where + ": expected " + std::to_string(header.size()) + " columns");
    Point p{parse_number(cells[col[0]], where), parse_number(cells[col[1]], where), parse_number(cells[col[2]], where),
            parse_number(cells[col[3]], where)};
    check_point(p, row, source);
    cloud.points.push_back(p);
    ++row;
  }
  return cloud;
}

void write_csv(const PointCloud& cloud, std::ostream& out) {
  out << "x,y,z,intensity\n";
  char buf[160];
  for (const Point& p : cloud.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.x, p.y, p.z, p.intensity);
    out << buf;
  }
}

PointCloud read_cloud(const std::filesystem::path& path, std::optional<CloudFormat> format) {
  const CloudFormat fmt = format.value_or(format_for_path(path));
  if (fmt == CloudFormat::csv) {
    std::ifstream in = open_in(path);
    return read_csv(in, path.string());
  }
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  return read_pcd(in, path.string());
}

void write_cloud(const PointCloud& cloud, const std::filesystem::path& path, std::optional<CloudFormat> format) {
  const CloudFormat fmt = format.value_or(format_for_path(path));
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  if (fmt == CloudFormat::csv) {
    write_csv(cloud, out);
  } else {
    write_pcd(cloud, out, fmt == CloudFormat::pcd_binary);
  }
  finish(out, path);
}

// ---------------------------------------------------------------------------
// Sidecars

void write_labels(std::span<const Label> labels, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << i << ',' << (labels[i] == Label::aerosol ? "aerosol" : "environment") << '\n';
  }
  finish(out, path);
}

std::vector<Label> read_labels(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || lower(trim(line)) != "index,label") {
    throw DataError(path.string() + ": expected header 'index,label'");
  }
  std::vector<std::pair<std::size_t, Label>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    const std::string where = path.string() + ": row " + std::to_string(rows.size());
    if (cells.size() != 2) throw DataError(where + ": expected 2 columns");
    const double idx = parse_number(cells[0], where);
    if (idx < 0 || idx != std::floor(idx)) throw DataError(where + ": bad index");
    Label label;
    if (cells[1] == "aerosol") {
      label = Label::aerosol;
    } else if (cells[1] == "environment") {
      label = Label::environment;
    } else {
      throw DataError(where + ": unknown label '" + cells[1] + "'");
    }
    rows.emplace_back(static_cast<std::size_t>(idx), label);
  }
  std::vector<Label> labels(rows.size(), Label::environment);
  std::vector<bool> seen(rows.size(), false);
  for (const auto& [idx, label] : rows) {
    if (idx >= rows.size() || seen[idx]) throw DataError(path.string() + ": indices must cover 0..n-1 exactly once");
    seen[idx] = true;
    labels[idx] = label;
  }
  return labels;
}

void write_indices(std::span<const std::size_t> indices, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "index\n";
  for (std::size_t i : indices) out << i << '\n';
  finish(out, path);
}

std::vector<std::size_t> read_indices(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || lower(trim(line)) != "index") {
    throw DataError(path.string() + ": expected header 'index'");
  }
  std::vector<std::size_t> out;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string where = path.string() + ": row " + std::to_string(out.size());
    const double v = parse_number(t, where);
    if (v < 0 || v != std::floor(v)) throw DataError(where + ": bad index");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw ParameterError(where + " must be a JSON object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ParameterError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <typename T>
void read_key(const json& obj, const char* key, T& target, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParameterError("config key '" + (where.empty() ? std::string(key) : where + "." + key) + "' has the wrong type");
  }
}

void read_count(const json& obj, const char* key, std::size_t& target, const std::string& where) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const std::string name = where.empty() ? std::string(key) : where + "." + key;
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParameterError("config key '" + name + "' must be a non-negative integer");
  }
  target = v.get<std::size_t>();
}

void read_sg(const json& obj, SgConfig& sg, const std::string& where) {
  reject_unknown(obj,
                 {"degree", "half_window", "residual_tolerance", "use_optimal_window", "max_half_window",
                  "max_azimuth_gap", "sample_count", "mode"},
                 where);
  read_key(obj, "degree", sg.degree, where);
  read_key(obj, "half_window", sg.half_window, where);
  read_key(obj, "residual_tolerance", sg.residual_tolerance, where);
  read_key(obj, "use_optimal_window", sg.use_optimal_window, where);
  read_key(obj, "max_half_window", sg.max_half_window, where);
  read_key(obj, "max_azimuth_gap", sg.max_azimuth_gap, where);
  read_count(obj, "sample_count", sg.sample_count, where);
  if (obj.contains("mode")) {
    std::string mode;
    read_key(obj, "mode", mode, where);
    if (mode == "reject") {
      sg.mode = SgMode::reject;
    } else if (mode == "replace") {
      sg.mode = SgMode::replace;
    } else {
      throw ParameterError("config key '" + where + ".mode' must be 'reject' or 'replace'");
    }
  }
}

json sg_to_json(const SgConfig& sg) {
  return json{{"degree", sg.degree},
              {"half_window", sg.half_window},
              {"residual_tolerance", sg.residual_tolerance},
              {"use_optimal_window", sg.use_optimal_window},
              {"max_half_window", sg.max_half_window},
              {"max_azimuth_gap", sg.max_azimuth_gap},
              {"sample_count", sg.sample_count},
              {"mode", sg.mode == SgMode::reject ? "reject" : "replace"}};
}

void read_stages(const json& obj, StageFlags& flags, const std::string& where) {
  reject_unknown(obj, {"intensity", "sg", "doscor", "ror2d"}, where);
  read_key(obj, "intensity", flags.intensity, where);
  read_key(obj, "sg", flags.sg, where);
  read_key(obj, "doscor", flags.doscor, where);
  read_key(obj, "ror2d", flags.ror2d, where);
}

json stages_to_json(const StageFlags& f) {
  return json{{"intensity", f.intensity}, {"sg", f.sg}, {"doscor", f.doscor}, {"ror2d", f.ror2d}};
}

json weibull_to_json(const WeibullParams& w) { return json{{"alpha", w.alpha}, {"gamma", w.gamma}, {"mu", w.mu}}; }

}  // namespace

PipelineConfig config_from_json(const json& doc) {
  PipelineConfig cfg;
  reject_unknown(doc,
                 {"r_max", "r_min", "I_th", "r_d", "K_nn", "r_th", "c_th", "r_nn", "p", "close_budget", "rss",
                  "rss_envelope", "intensity", "sg_close", "sg_long", "doscor", "ror2d", "stages"},
                 "");
  read_key(doc, "r_max", cfg.r_max, "");
  read_key(doc, "r_min", cfg.r_min, "");
  read_key(doc, "I_th", cfg.intensity.initial_threshold, "");
  read_key(doc, "p", cfg.intensity.p, "");
  if (doc.contains("r_d")) {
    const json& rd = doc.at("r_d");
    if (!rd.is_array() || rd.size() != 2 || !rd[0].is_number() || !rd[1].is_number()) {
      throw ParameterError("config key 'r_d' must be a pair [close, long] of numbers");
    }
    cfg.sg_close.r_d = rd[0].get<double>();
    cfg.sg_long.r_d = rd[1].get<double>();
  }
  read_count(doc, "K_nn", cfg.doscor.k_min, "");
  read_key(doc, "r_th", cfg.doscor.r_th, "");
  read_key(doc, "c_th", cfg.doscor.c_th, "");
  read_key(doc, "r_nn", cfg.ror2d.r_nn, "");
  read_count(doc, "close_budget", cfg.close_budget, "");

  if (doc.contains("rss")) {
    const json& rss = doc.at("rss");
    reject_unknown(rss, {"v_r", "v_f", "a_accel", "a_min_brake", "a_max_brake", "eta"}, "rss");
    read_key(rss, "v_r", cfg.rss.v_r, "rss");
    read_key(rss, "v_f", cfg.rss.v_f, "rss");
    read_key(rss, "a_accel", cfg.rss.a_accel, "rss");
    read_key(rss, "a_min_brake", cfg.rss.a_min_brake, "rss");
    read_key(rss, "a_max_brake", cfg.rss.a_max_brake, "rss");
    read_key(rss, "eta", cfg.rss.eta, "rss");
  }
  if (doc.contains("rss_envelope")) {
    const json& env = doc.at("rss_envelope");
    if (!env.is_array()) throw ParameterError("config key 'rss_envelope' must be an array");
    for (const json& c : env) {
      reject_unknown(c, {"v_r", "v_f"}, "rss_envelope[]");
      VelocityCase vc;
      read_key(c, "v_r", vc.v_r, "rss_envelope[]");
      read_key(c, "v_f", vc.v_f, "rss_envelope[]");
      cfg.rss_envelope.push_back(vc);
    }
  }
  if (doc.contains("intensity")) {
    const json& in = doc.at("intensity");
    reject_unknown(in, {"clip_fraction", "histogram_bins", "location", "min_samples"}, "intensity");
    read_key(in, "clip_fraction", cfg.intensity.clip_fraction, "intensity");
    read_count(in, "histogram_bins", cfg.intensity.histogram_bins, "intensity");
    read_count(in, "min_samples", cfg.intensity.min_samples, "intensity");
    if (in.contains("location")) {
      std::string loc;
      read_key(in, "location", loc, "intensity");
      if (loc == "zero") {
        cfg.intensity.location = WeibullLocation::zero;
      } else if (loc == "sample_min") {
        cfg.intensity.location = WeibullLocation::sample_min;
      } else {
        throw ParameterError("config key 'intensity.location' must be 'zero' or 'sample_min'");
      }
    }
  }
  if (doc.contains("sg_close")) read_sg(doc.at("sg_close"), cfg.sg_close, "sg_close");
  if (doc.contains("sg_long")) read_sg(doc.at("sg_long"), cfg.sg_long, "sg_long");
  if (doc.contains("doscor")) {
    reject_unknown(doc.at("doscor"), {"query_radius"}, "doscor");
    read_key(doc.at("doscor"), "query_radius", cfg.doscor.query_radius, "doscor");
  }
  if (doc.contains("ror2d")) {
    reject_unknown(doc.at("ror2d"), {"k_nn"}, "ror2d");
    read_count(doc.at("ror2d"), "k_nn", cfg.ror2d.k_nn, "ror2d");
  }
  if (doc.contains("stages")) {
    const json& st = doc.at("stages");
    reject_unknown(st, {"close", "long"}, "stages");
    if (st.contains("close")) read_stages(st.at("close"), cfg.close_stages, "stages.close");
    if (st.contains("long")) read_stages(st.at("long"), cfg.long_stages, "stages.long");
  }

  validate(cfg);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const PipelineConfig& cfg) {
  json envelope = json::array();
  for (const VelocityCase& c : cfg.rss_envelope) envelope.push_back({{"v_r", c.v_r}, {"v_f", c.v_f}});
  return json{
      {"r_max", cfg.r_max},
      {"r_min", cfg.r_min},
      {"I_th", cfg.intensity.initial_threshold},
      {"r_d", {cfg.sg_close.r_d, cfg.sg_long.r_d}},
      {"K_nn", cfg.doscor.k_min},
      {"r_th", cfg.doscor.r_th},
      {"c_th", cfg.doscor.c_th},
      {"r_nn", cfg.ror2d.r_nn},
      {"p", cfg.intensity.p},
      {"close_budget", cfg.close_budget},
      {"rss",
       {{"v_r", cfg.rss.v_r},
        {"v_f", cfg.rss.v_f},
        {"a_accel", cfg.rss.a_accel},
        {"a_min_brake", cfg.rss.a_min_brake},
        {"a_max_brake", cfg.rss.a_max_brake},
        {"eta", cfg.rss.eta}}},
      {"rss_envelope", envelope},
      {"intensity",
       {{"clip_fraction", cfg.intensity.clip_fraction},
        {"histogram_bins", cfg.intensity.histogram_bins},
        {"location", cfg.intensity.location == WeibullLocation::zero ? "zero" : "sample_min"},
        {"min_samples", cfg.intensity.min_samples}}},
      {"sg_close", sg_to_json(cfg.sg_close)},
      {"sg_long", sg_to_json(cfg.sg_long)},
      {"doscor", {{"query_radius", cfg.doscor.query_radius}}},
      {"ror2d", {{"k_nn", cfg.ror2d.k_nn}}},
      {"stages", {{"close", stages_to_json(cfg.close_stages)}, {"long", stages_to_json(cfg.long_stages)}}},
  };
}

json report_to_json(const FilterReport& report) {
  json stages = json::array();
  for (const StageReport& s : report.stages) {
    json entry{{"stage", s.stage},       {"branch", s.branch}, {"input", s.input},
               {"kept", s.kept},         {"rejected", s.rejected}, {"ms", s.ms}};
    if (!s.error.empty()) entry["error"] = s.error;
    stages.push_back(std::move(entry));
  }
  json out{{"input", report.input},
           {"close", report.close},
           {"long", report.long_range},
           {"dropped", report.dropped},
           {"filtered", report.filtered},
           {"rejected", report.rejected},
           {"latency_ms", report.latency_ms},
           {"adaptive_update", report.adaptive_update},
           {"r_min", report.r_min},
           {"r_max", report.r_max},
           {"I_th", report.i_th},
           {"stages", stages}};
  out["timestamp"] = report.timestamp ? json(*report.timestamp) : json(nullptr);
  out["weibull"] = report.fit ? weibull_to_json(*report.fit) : json(nullptr);
  if (!report.fit_error.empty()) out["fit_error"] = report.fit_error;
  return out;
}

SceneSpec scene_from_json(const json& doc) {
  reject_unknown(doc, {"tunnel", "blobs", "environment_intensity", "aerosol_intensity", "range_noise_sigma", "seed"},
                 "scene");
  std::uint64_t seed = 1;
  read_key(doc, "seed", seed, "scene");
  SceneSpec spec = default_scene(seed);
  if (doc.contains("tunnel")) {
    const json& t = doc.at("tunnel");
    reject_unknown(t, {"length", "width", "height", "spacing", "x_start", "floor_z"}, "scene.tunnel");
    read_key(t, "length", spec.tunnel.length, "scene.tunnel");
    read_key(t, "width", spec.tunnel.width, "scene.tunnel");
    read_key(t, "height", spec.tunnel.height, "scene.tunnel");
    read_key(t, "spacing", spec.tunnel.spacing, "scene.tunnel");
    read_key(t, "x_start", spec.tunnel.x_start, "scene.tunnel");
    read_key(t, "floor_z", spec.tunnel.floor_z, "scene.tunnel");
  }
  if (doc.contains("blobs")) {
    const json& blobs = doc.at("blobs");
    if (!blobs.is_array()) throw ParameterError("scene key 'blobs' must be an array");
    spec.blobs.clear();
    for (const json& b : blobs) {
      reject_unknown(b, {"center", "radius", "points", "falloff"}, "scene.blobs[]");
      BlobSpec blob;
      read_key(b, "center", blob.center, "scene.blobs[]");
      read_key(b, "radius", blob.radius, "scene.blobs[]");
      read_count(b, "points", blob.points, "scene.blobs[]");
      read_key(b, "falloff", blob.falloff, "scene.blobs[]");
      spec.blobs.push_back(blob);
    }
  }
  if (doc.contains("environment_intensity")) {
    const json& e = doc.at("environment_intensity");
    reject_unknown(e, {"mean", "spread"}, "scene.environment_intensity");
    read_key(e, "mean", spec.environment_intensity.mean, "scene.environment_intensity");
    read_key(e, "spread", spec.environment_intensity.spread, "scene.environment_intensity");
  }
  if (doc.contains("aerosol_intensity")) {
    const json& a = doc.at("aerosol_intensity");
    reject_unknown(a, {"alpha", "gamma", "mu"}, "scene.aerosol_intensity");
    read_key(a, "alpha", spec.aerosol_intensity.alpha, "scene.aerosol_intensity");
    read_key(a, "gamma", spec.aerosol_intensity.gamma, "scene.aerosol_intensity");
    read_key(a, "mu", spec.aerosol_intensity.mu, "scene.aerosol_intensity");
  }
  read_key(doc, "range_noise_sigma", spec.range_noise_sigma, "scene");
  return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return scene_from_json(doc);
}

}  // namespace smokefilter
