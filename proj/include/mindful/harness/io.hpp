#pragma once

#include <string>

namespace mindful::harness {

// Writes to a sibling temporary file and renames it over `path`, creating
// parent directories as needed.
void atomic_write(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// Class ids may contain spaces or slashes; keep file names portable.
std::string safe_file_component(const std::string& name);

}  // namespace mindful::harness
