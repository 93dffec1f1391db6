#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

namespace gausscap {

/// Pretty JSON with every double printed at 17 significant digits; NaN and
/// infinities become null. Key order is kept.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

/// Write via a sibling temporary and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace gausscap
