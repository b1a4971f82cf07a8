#pragma once
// File helpers shared by loaders and the CLI. Writes go through a temp file
// plus rename so consumers never observe partial output.

#include <filesystem>
#include <string>

namespace ewreward {

std::string read_text_file(const std::filesystem::path& path);

// Writes to "<path>.tmp" then renames over the target.
void atomic_write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ewreward
