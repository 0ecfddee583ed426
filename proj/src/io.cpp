// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/io.hpp"

#include "censorfc/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace censorfc::io {

namespace fs = std::filesystem;

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "bin") return Format::Binary;
  throw ArgumentError("unknown format '" + std::string(name) + "' (expected csv or bin)");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

bool parse_number(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return res.ec == std::errc() && res.ptr == cell.data() + cell.size();
}

}  // namespace

CsvTable read_csv(const fs::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto cells = split_commas(view);
    if (header_pending) {
      for (auto c : cells) table.header.emplace_back(c);
      cols = cells.size();
      header_pending = false;
      continue;
    }
    if (cols == 0) cols = cells.size();
    if (cells.size() != cols) {
      throw ShapeError("ragged CSV " + path.string() + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v)) {
        throw ParseError("non-numeric cell '" + std::string(cells[c]) + "' in " + path.string(), line_no, c + 1);
      }
      values.push_back(v);
    }
    ++rows;
  }
  table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
  return table;
}

Matrix read_csv_matrix(const fs::path& path) { return read_csv(path, false).values; }

void write_csv_matrix(const fs::path& path, const Matrix& m, const std::vector<std::string>& header) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 20);
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out += ',';
      out += header[c];
    }
    out += '\n';
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

// ---------------------------------------------------------------------------
// Binary

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

template <class T>
void put(std::string& out, T v) {
  v = to_little(v);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(std::string data, fs::path path) : data_(std::move(data)), path_(std::move(path)) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) throw ParseError("truncated binary file " + path_.string());
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }
  void expect_magic(const char (&magic)[8]) {
    if (data_.size() < 8 || std::memcmp(data_.data(), magic, 8) != 0)
      throw ParseError("bad magic in " + path_.string());
    pos_ = 8;
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  fs::path path_;
  std::size_t pos_ = 0;
};

bool has_magic(const fs::path& path, const char (&magic)[8]) {
  std::ifstream in(path, std::ios::binary);
  char buf[8] = {};
  in.read(buf, 8);
  return in.gcount() == 8 && std::memcmp(buf, magic, 8) == 0;
}

}  // namespace

bool is_binary_timeseries(const fs::path& path) { return has_magic(path, kTimeseriesMagic); }

void write_timeseries_binary(const fs::path& path, const ParcelTimeseries& ts) {
  std::string out(kTimeseriesMagic, 8);
  put<std::uint64_t>(out, ts.parcels());
  put<std::uint64_t>(out, ts.volumes());
  put<double>(out, ts.tr_seconds());
  const auto& d = ts.data();
  for (Eigen::Index t = 0; t < d.rows(); ++t)
    for (Eigen::Index p = 0; p < d.cols(); ++p) put<double>(out, d(t, p));
  write_file_atomic(path, out);
}

ParcelTimeseries read_timeseries_binary(const fs::path& path) {
  Reader r(read_file(path), path);
  r.expect_magic(kTimeseriesMagic);
  const auto parcels = r.get<std::uint64_t>();
  const auto volumes = r.get<std::uint64_t>();
  const double tr = r.get<double>();
  Matrix data(static_cast<Eigen::Index>(volumes), static_cast<Eigen::Index>(parcels));
  for (Eigen::Index t = 0; t < data.rows(); ++t)
    for (Eigen::Index p = 0; p < data.cols(); ++p) data(t, p) = r.get<double>();
  if (!r.at_end()) throw ParseError("trailing bytes in " + path.string());
  return ParcelTimeseries(std::move(data), tr);
}

ParcelTimeseries load_timeseries(const fs::path& path, double tr_seconds, const LoadOptions& options) {
  Matrix data;
  double tr = tr_seconds;
  if (is_binary_timeseries(path)) {
    auto ts = read_timeseries_binary(path);
    if (tr > 0.0 && std::abs(tr - ts.tr_seconds()) > 1e-12)
      throw ValidationError("TR " + format_double(tr) + " disagrees with binary header " + format_double(ts.tr_seconds()));
    tr = ts.tr_seconds();
    data = ts.data();
  } else {
    data = read_csv_matrix(path);
    if (!(tr > 0.0)) {
      auto side = sidecar_path(path);
      if (!fs::exists(side)) throw ArgumentError("no TR given and no sidecar " + side.string());
      tr = read_sidecar(side).tr_seconds;
    }
  }
  const auto drop = static_cast<Eigen::Index>(options.drop_initial);
  if (drop >= data.rows())
    throw ShapeError("dropping " + std::to_string(drop) + " volumes leaves nothing of " + std::to_string(data.rows()));
  Matrix kept = data.bottomRows(data.rows() - drop);
  return ParcelTimeseries(std::move(kept), tr, options.run_id, options.participant_id);
}

void save_timeseries(const fs::path& path, const ParcelTimeseries& ts, Format format) {
  if (format == Format::Binary) {
    write_timeseries_binary(path, ts);
  } else {
    write_csv_matrix(path, ts.data());
  }
}

// ---------------------------------------------------------------------------
// FC

FcMatrix load_fc(const fs::path& path) {
  FcMatrix fc;
  if (has_magic(path, kFcMagic)) {
    Reader r(read_file(path), path);
    r.expect_magic(kFcMagic);
    fc.parcel_count = r.get<std::uint64_t>();
    fc.n_volumes_retained = r.get<std::uint64_t>();
    fc.z.resize(static_cast<Eigen::Index>(edge_count(fc.parcel_count)));
    for (Eigen::Index k = 0; k < fc.z.size(); ++k) fc.z(k) = r.get<double>();
    if (!r.at_end()) throw ParseError("trailing bytes in " + path.string());
    fc.validate();
    return fc;
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string first;
  std::getline(in, first);
  unsigned long long p = 0, n = 0;
  if (std::sscanf(first.c_str(), "# parcel_count=%llu,n_volumes_retained=%llu", &p, &n) != 2)
    throw ParseError("missing FC header comment in " + path.string(), 1, 1);
  in.close();
  auto table = read_csv(path, true);
  if (table.values.cols() != 3) throw ShapeError("FC CSV must have columns i,j,z");
  fc.parcel_count = p;
  fc.n_volumes_retained = n;
  fc.z.resize(static_cast<Eigen::Index>(edge_count(p)));
  if (static_cast<std::size_t>(table.values.rows()) != edge_count(p))
    throw ShapeError("FC CSV has " + std::to_string(table.values.rows()) + " edges, expected " + std::to_string(edge_count(p)));
  for (Eigen::Index k = 0; k < table.values.rows(); ++k) {
    const auto i = static_cast<std::size_t>(table.values(k, 0));
    const auto j = static_cast<std::size_t>(table.values(k, 1));
    fc.z(static_cast<Eigen::Index>(edge_index(i, j, p))) = table.values(k, 2);
  }
  fc.validate();
  return fc;
}

void save_fc(const fs::path& path, const FcMatrix& fc, Format format) {
  if (format == Format::Binary) {
    std::string out(kFcMagic, 8);
    put<std::uint64_t>(out, fc.parcel_count);
    put<std::uint64_t>(out, fc.n_volumes_retained);
    for (Eigen::Index k = 0; k < fc.z.size(); ++k) put<double>(out, fc.z(k));
    write_file_atomic(path, out);
    return;
  }
  std::string out = "# parcel_count=" + std::to_string(fc.parcel_count) +
                    ",n_volumes_retained=" + std::to_string(fc.n_volumes_retained) + "\ni,j,z\n";
  for (Eigen::Index k = 0; k < fc.z.size(); ++k) {
    auto [i, j] = edge_pair(static_cast<std::size_t>(k), fc.parcel_count);
    out += std::to_string(i) + ',' + std::to_string(j) + ',' + format_double(fc.z(k)) + '\n';
  }
  write_file_atomic(path, out);
}

// ---------------------------------------------------------------------------
// Sidecars, masks, cohorts

fs::path sidecar_path(const fs::path& data_path) {
  fs::path p = data_path;
  p.replace_extension(".json");
  return p;
}

RunMetadata read_sidecar(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("invalid sidecar JSON " + path.string() + ": " + e.what());
  }
  RunMetadata m;
  m.participant_id = j.value("participant_id", "");
  m.run_id = j.value("run_id", "");
  m.tr_seconds = j.value("tr_seconds", 0.0);
  if (!(m.tr_seconds > 0.0)) throw ValidationError("sidecar " + path.string() + " lacks a positive tr_seconds");
  return m;
}

void write_sidecar(const fs::path& path, const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["participant_id"] = meta.participant_id;
  j["run_id"] = meta.run_id;
  j["tr_seconds"] = meta.tr_seconds;
  write_file_atomic(path, j.dump(2) + "\n");
}

KeepVector read_mask(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  KeepVector keep;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    if (v == "1") {
      keep.push_back(true);
    } else if (v == "0") {
      keep.push_back(false);
    } else {
      throw ParseError("mask entries must be 0 or 1 in " + path.string(), line_no, 1);
    }
  }
  return keep;
}

void write_mask(const fs::path& path, const KeepVector& keep) {
  std::string out;
  out.reserve(keep.size() * 2);
  for (bool k : keep) {
    out += k ? '1' : '0';
    out += '\n';
  }
  write_file_atomic(path, out);
}

CohortTable read_cohort(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CohortTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    auto v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    auto cells = split_commas(v);
    if (cells.size() != 4) throw ShapeError("cohort CSV line " + std::to_string(line_no) + " must have 4 cells");
    if (header) {
      header = false;
      if (cells[0] == "participant_id") continue;
    }
    double value = 0.0;
    if (!parse_number(cells[3], value)) throw ParseError("non-numeric cohort value", line_no, 4);
    table.add(std::string(cells[0]), std::string(cells[1]), std::string(cells[2]), value);
  }
  return table;
}

void write_cohort(const fs::path& path, const CohortTable& table) {
  std::string out = "participant_id,session_id,measure,value\n";
  for (const auto& r : table.rows()) {
    out += r.participant_id + ',' + r.session_id + ',' + r.measure + ',' + format_double(r.value) + '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace censorfc::io
