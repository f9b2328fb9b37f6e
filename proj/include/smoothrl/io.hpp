#pragma once

#include <filesystem>
#include <string_view>

namespace smoothrl {

/// Writes `content` to a temporary file next to `path`, then renames it over
/// `path`. Readers never observe a partially written file. Creates missing
/// parent directories. Throws std::filesystem::filesystem_error or
/// std::runtime_error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace smoothrl
