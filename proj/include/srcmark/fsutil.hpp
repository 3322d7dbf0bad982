#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "srcmark/config.hpp"
#include "srcmark/error.hpp"

namespace srcmark {

// fnmatch-style matching. Patterns without '/' match the basename; patterns
// with '/' match the whole project-relative path ('*' does not cross '/').
bool glob_match(std::string_view pattern, std::string_view relative_path);

// Regular files under the project root matching include/exclude globs,
// sorted by path. Skips .git and the tool's private directory.
Result<std::vector<std::string>> enumerate_files(const ToolConfig& config);

Result<std::string> read_file(const std::filesystem::path& path);

// write-temp-then-rename in the target directory
Result<void> write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Runs fn(0..count-1) on up to `jobs` worker threads. fn must be safe to run
// concurrently for distinct indices.
void parallel_for(unsigned jobs, std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace srcmark
