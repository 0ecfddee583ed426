// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/schemas.hpp"

#include <array>
#include <utility>

namespace censorfc::schemas {

namespace {

constexpr std::string_view kManifest = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.manifest/1",
  "type": "object",
  "required": ["runs", "grid"],
  "properties": {
    "runs": {
      "type": "array", "minItems": 1,
      "items": {
        "type": "object",
        "required": ["participant", "timeseries", "motion"],
        "properties": {
          "participant": {"type": "string", "minLength": 1},
          "session": {"type": "string"},
          "run": {"type": "string"},
          "timeseries": {"type": "string"},
          "motion": {"type": "string"},
          "tr_seconds": {"type": "number", "minimum": 0}
        }
      }
    },
    "grid": {
      "type": "object",
      "required": ["durations_minutes", "policies"],
      "properties": {
        "durations_minutes": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
        "policies": {"type": "array", "minItems": 1, "items": {"enum": ["none", "lenient", "stringent", "expanded"]}}
      }
    },
    "splits": {
      "type": "object",
      "additionalProperties": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["estimate", "truth"],
          "properties": {
            "estimate": {"type": "array", "minItems": 1, "items": {"type": "string"}},
            "truth": {"type": "array", "minItems": 1, "items": {"type": "string"}}
          }
        }
      }
    },
    "settings": {
      "type": "object",
      "properties": {
        "drop_initial": {"type": "integer", "minimum": 0},
        "highpass_hz": {"type": "number"},
        "nuisance": {"enum": ["none", "24p"]},
        "truth_policy": {"enum": ["none", "lenient", "stringent", "expanded"]},
        "min_truth_minutes": {"type": "number", "minimum": 0},
        "min_heldout_volumes": {"type": "integer", "minimum": 0},
        "max_lag": {"type": "integer", "minimum": 1},
        "target_rmse": {"type": ["number", "null"]},
        "qcfc": {"type": "boolean"},
        "threads": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0}
      }
    },
    "output_dir": {"type": "string"},
    "measures": {"type": ["string", "null"]},
    "centroids": {"type": ["string", "null"]}
  }
})";

constexpr std::string_view kSimConfig = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.sim_config/1",
  "type": "object",
  "properties": {
    "n_participants": {"type": "integer", "minimum": 1},
    "sessions_per_participant": {"type": "integer", "minimum": 1},
    "runs_per_session": {"type": "integer", "minimum": 1},
    "T_volumes": {"type": "integer", "minimum": 3},
    "tr_seconds": {"type": "number", "exclusiveMinimum": 0},
    "parcel_count": {"type": "integer", "minimum": 2},
    "fc_rank": {"type": "integer", "minimum": 1},
    "ar1_phi": {"type": "number", "exclusiveMinimum": -1, "exclusiveMaximum": 1},
    "true_fc_signal_var": {"type": "number", "minimum": 0},
    "motion": {
      "type": "object",
      "properties": {
        "baseline_fd_mm": {"type": "number", "minimum": 0},
        "trait_sd": {"type": "number", "minimum": 0},
        "state_sd": {"type": "number", "minimum": 0},
        "volume_jitter_sd": {"type": "number", "minimum": 0},
        "spike_rate": {"type": "number", "minimum": 0},
        "spike_fd_magnitude": {"type": "number", "exclusiveMinimum": 0},
        "burst_mean_length": {"type": "number", "minimum": 1}
      }
    },
    "artifact": {
      "type": "object",
      "properties": {
        "amplitude": {"type": "number", "minimum": 0},
        "distance_decay_mm": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "trait_fc_coupling": {"type": "number"},
    "state_fc_coupling": {"type": "number"},
    "behavior_rho": {"type": "number", "exclusiveMinimum": -1, "exclusiveMaximum": 1},
    "behavior_edges": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    "behavior_icc": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    "group_fc": {"type": ["array", "null"], "items": {"type": "array", "items": {"type": "number"}}},
    "seed": {"type": "integer", "minimum": 0}
  }
})";

constexpr std::string_view kError = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.error/1",
  "type": "object",
  "required": ["error"],
  "properties": {
    "error": {
      "type": "object",
      "required": ["kind", "message"],
      "properties": {"kind": {"type": "string"}, "message": {"type": "string"}}
    }
  }
})";

constexpr std::string_view kCell = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.cell/1",
  "type": "object",
  "required": ["schema", "participant", "duration_minutes", "policy", "status", "config_digest", "config"],
  "properties": {
    "schema": {"const": "censorfc.cell/1"},
    "participant": {"type": "string"},
    "duration_minutes": {"type": "number"},
    "policy": {"enum": ["none", "lenient", "stringent", "expanded"]},
    "status": {"enum": ["ok", "failed"]},
    "rmse": {"type": "number", "minimum": 0},
    "mse": {"type": "number", "minimum": 0},
    "t_eff": {"type": ["number", "null"]},
    "retained_volumes": {"type": "number"},
    "nominal_volumes": {"type": "number"},
    "partitions": {"type": "array"},
    "squared_error": {"type": "array", "items": {"type": ["number", "null"]}},
    "error": {"type": "object"},
    "config_digest": {"type": "string"},
    "config": {"type": "object"}
  }
})";

constexpr std::string_view kSummary = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.summary/1",
  "type": "object",
  "required": ["schema", "config_digest", "config", "cells", "failures", "reports", "ess", "wilcoxon"],
  "properties": {
    "schema": {"const": "censorfc.summary/1"},
    "cells": {
      "type": "object",
      "required": ["total", "run", "skipped", "failed"],
      "properties": {
        "total": {"type": "integer"}, "run": {"type": "integer"},
        "skipped": {"type": "integer"}, "failed": {"type": "integer"}
      }
    },
    "failures": {"type": "array", "items": {"type": "object", "required": ["participant", "policy", "error"]}},
    "reports": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["duration_minutes", "policy", "participants", "overall_rmse"],
        "properties": {
          "overall_rmse": {"type": ["number", "null"]},
          "percent_change_vs_none": {"type": ["number", "null"]}
        }
      }
    },
    "ess": {"type": "array"},
    "wilcoxon": {"type": "array"},
    "required_duration": {"type": "array"},
    "qcfc": {"type": "array"},
    "bwas": {"type": "array"}
  }
})";

constexpr std::string_view kGroundTruth = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.ground_truth/1",
  "type": "object",
  "required": ["schema", "config", "acf", "sessions", "behavior_true", "fc_icc"],
  "properties": {
    "schema": {"const": "censorfc.ground_truth/1"},
    "acf": {"type": "array", "items": {"type": "number"}},
    "group_z": {"type": "array"},
    "sessions": {"type": "array"},
    "runs": {"type": "array"},
    "behavior_true": {"type": "array", "items": {"type": "number"}},
    "behavior_rho": {"type": "array"},
    "fc_icc": {"type": "array"}
  }
})";

constexpr std::string_view kCensorReport = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.censor/1",
  "type": "object",
  "required": ["policy", "volumes", "kept", "stats"],
  "properties": {
    "policy": {"type": "object"},
    "volumes": {"type": "integer"},
    "kept": {"type": "integer"},
    "stats": {
      "type": "object",
      "properties": {
        "flagged": {"type": "integer"}, "flagged_fd": {"type": "integer"}, "flagged_dvars": {"type": "integer"},
        "expansion_added": {"type": "integer"}, "segment_removed": {"type": "integer"}
      }
    },
    "high_motion_fraction": {"type": "number"},
    "mean_fd": {"type": "number"}
  }
})";

constexpr std::string_view kFcErrorReport = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.fc_error/1",
  "type": "object",
  "required": ["overall_rmse", "edges", "partitions"],
  "properties": {
    "overall_rmse": {"type": "number", "minimum": 0},
    "mse": {"type": "number", "minimum": 0},
    "edges": {"type": "integer"},
    "partitions": {"type": "integer"}
  }
})";

constexpr std::string_view kEssReport = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.ess/1",
  "type": "object",
  "required": ["max_lag", "acf", "runs"],
  "properties": {
    "max_lag": {"type": "integer"},
    "acf": {"type": "array", "items": {"type": "number"}},
    "runs": {
      "type": "array",
      "items": {"type": "object", "required": ["path", "volumes", "kept", "t_eff"]}
    }
  }
})";

constexpr std::string_view kQcfcReport = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.qcfc/1",
  "type": "object",
  "required": ["observations", "participants", "standard", "between", "within"],
  "properties": {
    "observations": {"type": "integer"},
    "participants": {"type": "integer"},
    "standard": {"type": "object"},
    "between": {"type": ["object", "null"]},
    "within": {"type": ["object", "null"]},
    "validation": {"type": ["object", "null"]}
  }
})";

constexpr std::string_view kBwasIcc = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.bwas_icc/1",
  "type": "object",
  "required": ["signal_var", "noise_var", "icc", "clipped", "n"],
  "properties": {
    "signal_var": {"type": "number", "minimum": 0},
    "noise_var": {"type": "number", "minimum": 0},
    "icc": {"type": "number", "minimum": 0, "maximum": 1},
    "clipped": {"type": "boolean"},
    "n": {"type": "integer"},
    "t_ref_minutes": {"type": "number"},
    "extrapolated": {"type": "array"}
  }
})";

constexpr std::string_view kBwasPlan = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.bwas_plan/1",
  "type": "object",
  "required": ["rho", "icc_x", "icc_y", "proportional_strength", "correction_factor"],
  "properties": {
    "proportional_strength": {"type": "number", "minimum": 0, "maximum": 1},
    "correction_factor": {"type": ["number", "null"]},
    "required_n": {"type": ["integer", "null"]},
    "variance": {"type": ["number", "null"]}
  }
})";

constexpr std::string_view kBwasAttenuation = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.bwas_attenuation/1",
  "type": "object",
  "required": ["mean_ratio", "included", "excluded_floor", "excluded_near_zero"],
  "properties": {
    "mean_ratio": {"type": ["number", "null"]},
    "included": {"type": "integer"},
    "excluded_floor": {"type": "integer"},
    "excluded_near_zero": {"type": "integer"},
    "clipped": {"type": "integer"}
  }
})";

constexpr std::string_view kRequiredDuration = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "censorfc.required_duration/1",
  "type": "object",
  "required": ["target_rmse", "minutes"],
  "properties": {
    "target_rmse": {"type": "number"},
    "minutes": {"type": "number"},
    "clamp_low": {"type": "number"},
    "clamp_high": {"type": "number"}
  }
})";

constexpr std::array<std::pair<std::string_view, std::string_view>, 14> kAll{{
    {"manifest", kManifest},
    {"sim-config", kSimConfig},
    {"error", kError},
    {"cell", kCell},
    {"summary", kSummary},
    {"ground-truth", kGroundTruth},
    {"censor", kCensorReport},
    {"fc-error", kFcErrorReport},
    {"ess", kEssReport},
    {"qcfc", kQcfcReport},
    {"bwas-icc", kBwasIcc},
    {"bwas-plan", kBwasPlan},
    {"bwas-attenuation", kBwasAttenuation},
    {"required-duration", kRequiredDuration},
}};

}  // namespace

std::vector<std::string_view> names() {
  std::vector<std::string_view> out;
  for (const auto& [n, s] : kAll) out.push_back(n);
  return out;
}

std::optional<std::string_view> get(std::string_view name) {
  for (const auto& [n, s] : kAll)
    if (n == name) return s;
  return std::nullopt;
}

}  // namespace censorfc::schemas
