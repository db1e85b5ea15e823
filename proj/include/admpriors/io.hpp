#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace admpriors {

/// 64-bit FNV-1a digest as 16 hex digits.
std::string config_hash(std::string_view text);

/// Writes to a temporary sibling and renames it into place.
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// `# config_hash: <hash>` line prepended to CSV outputs.
std::string csv_hash_line(const std::string& hash);

}  // namespace admpriors
