// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "smokefilter/cloud.hpp"
#include "smokefilter/eval.hpp"
#include "smokefilter/pipeline.hpp"

namespace smokefilter {

enum class CloudFormat { pcd_ascii, pcd_binary, csv };

/// "pcd-ascii", "pcd-binary" or "csv".
CloudFormat parse_format(std::string_view name);
std::string format_name(CloudFormat format);
/// By extension: .csv -> csv, anything else -> binary PCD.
CloudFormat format_for_path(const std::filesystem::path& path);

/// Reads a PCD (x y z intensity, F4, ascii or binary) or CSV cloud. PCD
/// files are decoded according to their DATA line; CSV is chosen by the
/// .csv extension unless a format is given. Throws DataError on malformed
/// headers, count mismatches, missing intensity and non-finite coordinates.
PointCloud read_cloud(const std::filesystem::path& path, std::optional<CloudFormat> format = std::nullopt);
PointCloud read_pcd(std::istream& in, const std::string& source = "<stream>");
PointCloud read_csv(std::istream& in, const std::string& source = "<stream>");

void write_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                 std::optional<CloudFormat> format = std::nullopt);
void write_pcd(const PointCloud& cloud, std::ostream& out, bool binary);
void write_csv(const PointCloud& cloud, std::ostream& out);

/// Label sidecar: CSV "index,label" with label environment|aerosol.
void write_labels(std::span<const Label> labels, const std::filesystem::path& path);
std::vector<Label> read_labels(const std::filesystem::path& path);

/// Index sidecar: CSV with a single "index" column.
void write_indices(std::span<const std::size_t> indices, const std::filesystem::path& path);
std::vector<std::size_t> read_indices(const std::filesystem::path& path);

/// Pipeline configuration from JSON. Absent keys take their defaults;
/// unknown keys and out-of-range values throw ParameterError naming the key.
PipelineConfig config_from_json(const nlohmann::json& doc);
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const PipelineConfig& cfg);

nlohmann::json report_to_json(const FilterReport& report);

/// Scene description; starts from default_scene(seed) and overrides the given keys.
SceneSpec scene_from_json(const nlohmann::json& doc);
SceneSpec load_scene_spec(const std::filesystem::path& path);

}  // namespace smokefilter
