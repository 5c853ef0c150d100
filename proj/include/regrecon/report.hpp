// Report plumbing: hashing, JSON numbers, deterministic file output.
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace regrecon {

std::string sha256_hex(std::string_view data);

// Finite doubles as numbers; ±inf and NaN as strings (JSON has no spelling for them).
nlohmann::json json_number(double v);

void write_file(const std::filesystem::path& path, std::string_view content);
std::string dump_json(const nlohmann::json& j);  // 2-space indent, trailing newline

}  // namespace regrecon
