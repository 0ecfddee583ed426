// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace censorfc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using KeepVector = std::vector<bool>;

// ---------------------------------------------------------------------------
// Edge indexing. Edges of a P-parcel connectome are the upper triangle
// (i < j) enumerated row-major: (0,1), (0,2), ..., (0,P-1), (1,2), ...
// ---------------------------------------------------------------------------

constexpr std::size_t edge_count(std::size_t parcels) { return parcels * (parcels - 1) / 2; }

/// Index of edge (i, j) with i < j < parcels. Throws ArgumentError otherwise.
std::size_t edge_index(std::size_t i, std::size_t j, std::size_t parcels);

/// Inverse of edge_index.
std::pair<std::size_t, std::size_t> edge_pair(std::size_t k, std::size_t parcels);

/// Parcel count P such that P(P-1)/2 == edges; throws ShapeError when none exists.
std::size_t parcels_for_edges(std::size_t edges);

// ---------------------------------------------------------------------------

/// Parcel-averaged signal of one run: rows are volumes, columns are parcels.
class ParcelTimeseries {
 public:
  ParcelTimeseries(Matrix data, double tr_seconds, std::string run_id = {}, std::string participant_id = {});

  const Matrix& data() const { return data_; }
  double tr_seconds() const { return tr_; }
  const std::string& run_id() const { return run_id_; }
  const std::string& participant_id() const { return participant_id_; }

  std::size_t volumes() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t parcels() const { return static_cast<std::size_t>(data_.cols()); }
  double duration_minutes() const { return static_cast<double>(volumes()) * tr_ / 60.0; }

  /// First `n` volumes.
  ParcelTimeseries head(std::size_t n) const;
  /// Only the rows where keep[t] is true.
  ParcelTimeseries select(const KeepVector& keep) const;

 private:
  Matrix data_;
  double tr_;
  std::string run_id_;
  std::string participant_id_;
};

/// Realignment parameters and the motion metrics derived from them.
struct MotionTrace {
  Matrix realignment;  // T x 6: x, y, z translations (mm), then 3 rotations (rad)
  Vector fd;           // mm, fd[0] == 0
  Vector dvars;        // dvars[0] == 0
  KeepVector fd_flags;
  KeepVector dvars_flags;

  std::size_t volumes() const { return static_cast<std::size_t>(fd.size()); }
  /// Checks lengths and non-negativity; throws ValidationError.
  void validate() const;
  MotionTrace head(std::size_t n) const;
};

enum class CensorLevel { None, Lenient, Stringent, Expanded };

std::string_view to_string(CensorLevel level);
CensorLevel parse_censor_level(std::string_view name);

struct CensorStats {
  std::size_t flagged = 0;          // base flags (FD or DVARS)
  std::size_t flagged_fd = 0;       // FD exceeded, regardless of DVARS
  std::size_t flagged_dvars = 0;    // DVARS flagged, regardless of FD
  std::size_t expansion_added = 0;  // neighbours of flagged volumes
  std::size_t segment_removed = 0;  // kept segments shorter than the minimum
  std::size_t total_censored() const { return flagged + expansion_added + segment_removed; }
};

struct CensorMask {
  KeepVector keep;
  CensorLevel policy = CensorLevel::None;
  double fd_threshold_mm = 0.0;
  CensorStats stats;

  std::size_t volumes() const { return keep.size(); }
  std::size_t kept() const;
  std::vector<std::size_t> censored_indices() const;
  static CensorMask keep_all(std::size_t volumes);
};

/// Fisher-z connectome in canonical edge order.
struct FcMatrix {
  Vector z;
  std::size_t n_volumes_retained = 0;
  std::size_t parcel_count = 0;

  std::size_t edges() const { return static_cast<std::size_t>(z.size()); }
  /// Checks edge count and finiteness; throws ValidationError / ShapeError.
  void validate() const;
  /// Symmetric P x P correlation-scale matrix (tanh of z, unit diagonal).
  Matrix to_correlation_matrix() const;
};

/// Long-format table of scalar measures keyed by (participant, session, measure).
class CohortTable {
 public:
  struct Row {
    std::string participant_id;
    std::string session_id;
    std::string measure;
    double value;
  };

  /// Throws ValidationError on a duplicate key or a non-finite value.
  void add(std::string participant_id, std::string session_id, std::string measure, double value);

  const std::vector<Row>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// Participants in order of first appearance.
  std::vector<std::string> participants() const;
  /// Sessions of a participant in order of first appearance.
  std::vector<std::string> sessions(const std::string& participant_id) const;
  /// Measure names in order of first appearance.
  std::vector<std::string> measures() const;

  std::optional<double> value(const std::string& participant_id, const std::string& session_id,
                              const std::string& measure) const;
  /// Mean of a measure over the available sessions of each participant (participants() order).
  /// Participants without the measure are omitted.
  std::vector<std::pair<std::string, double>> participant_means(const std::string& measure) const;

 private:
  std::vector<Row> rows_;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index_;
};

}  // namespace censorfc
