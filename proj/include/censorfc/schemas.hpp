// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace censorfc::schemas {

/// Names of the published JSON schemas (manifest, sim-config and every report type).
std::vector<std::string_view> names();

/// JSON Schema text for `name`, or nullopt when unknown.
std::optional<std::string_view> get(std::string_view name);

}  // namespace censorfc::schemas
