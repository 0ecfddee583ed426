// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "censorfc/core.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace censorfc::io {

enum class Format { Csv, Binary };

Format parse_format(std::string_view name);

struct CsvTable {
  std::vector<std::string> header;  // empty when read without a header
  Matrix values;
};

/// Reads a rectangular numeric CSV ('.' decimal, comma separated, '#' lines skipped).
/// Throws ParseError (with 1-based row/col) on a non-numeric cell and ShapeError on ragged rows.
/// Non-finite cells are parsed and left for the caller to validate.
CsvTable read_csv(const std::filesystem::path& path, bool has_header = false);
Matrix read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& header = {});

struct LoadOptions {
  std::size_t drop_initial = 15;
  std::string run_id;
  std::string participant_id;
};

/// Loads a T x P timeseries from CSV or the binary format (detected by magic bytes),
/// dropping the first `drop_initial` volumes.
ParcelTimeseries load_timeseries(const std::filesystem::path& path, double tr_seconds, const LoadOptions& options = {});
void save_timeseries(const std::filesystem::path& path, const ParcelTimeseries& ts, Format format);

// Binary layout (little-endian): 8-byte magic, u64 parcels, u64 volumes, f64 tr, row-major f64 data.
inline constexpr char kTimeseriesMagic[8] = {'C', 'F', 'C', 'T', 'S', 'B', '0', '1'};
// 8-byte magic, u64 parcels, u64 retained volumes, f64 edge values.
inline constexpr char kFcMagic[8] = {'C', 'F', 'C', 'F', 'C', 'B', '0', '1'};

bool is_binary_timeseries(const std::filesystem::path& path);
ParcelTimeseries read_timeseries_binary(const std::filesystem::path& path);
void write_timeseries_binary(const std::filesystem::path& path, const ParcelTimeseries& ts);

/// FC text format: "# parcel_count=P,n_volumes_retained=N" comment, header "i,j,z", one edge per line.
FcMatrix load_fc(const std::filesystem::path& path);
void save_fc(const std::filesystem::path& path, const FcMatrix& fc, Format format);

struct RunMetadata {
  std::string participant_id;
  std::string run_id;
  double tr_seconds = 0.0;
};

RunMetadata read_sidecar(const std::filesystem::path& path);
void write_sidecar(const std::filesystem::path& path, const RunMetadata& meta);
/// `run.csv` -> `run.json`
std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

/// One 0/1 per line, 1 = keep.
KeepVector read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const KeepVector& keep);

/// Columns participant_id,session_id,measure,value.
CohortTable read_cohort(const std::filesystem::path& path);
void write_cohort(const std::filesystem::path& path, const CohortTable& table);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace censorfc::io
