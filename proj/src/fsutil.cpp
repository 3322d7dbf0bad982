#include "srcmark/fsutil.hpp"

#include <fnmatch.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace srcmark {

namespace fs = std::filesystem;

bool glob_match(std::string_view pattern, std::string_view relative_path) {
    std::string pat(pattern);
    if (pattern.find('/') == std::string_view::npos) {
        std::size_t slash = relative_path.rfind('/');
        std::string base(slash == std::string_view::npos ? relative_path
                                                         : relative_path.substr(slash + 1));
        return ::fnmatch(pat.c_str(), base.c_str(), 0) == 0;
    }
    std::string path(relative_path);
    return ::fnmatch(pat.c_str(), path.c_str(), FNM_PATHNAME) == 0;
}

Result<std::vector<std::string>> enumerate_files(const ToolConfig& config) {
    std::vector<std::string> selected;
    std::error_code ec;
    fs::recursive_directory_iterator it(config.project_root,
                                        fs::directory_options::skip_permission_denied, ec);
    if (ec)
        return fail<std::vector<std::string>>(
            ErrorKind::Io, "cannot walk " + config.project_root.string() + ": " + ec.message());

    for (auto end = fs::end(it); it != end; it.increment(ec)) {
        if (ec) break;
        const fs::directory_entry& entry = *it;
        const std::string name = entry.path().filename().string();
        if (entry.is_directory(ec)) {
            if (name == ".git" || name == ".srcmark") it.disable_recursion_pending();
            continue;
        }
        if (!entry.is_regular_file(ec)) continue;
        std::string relative =
            entry.path().lexically_relative(config.project_root).generic_string();
        bool included = false;
        for (const std::string& glob : config.include_globs)
            if (glob_match(glob, relative)) {
                included = true;
                break;
            }
        if (!included) continue;
        for (const std::string& glob : config.exclude_globs)
            if (glob_match(glob, relative)) {
                included = false;
                break;
            }
        if (included) selected.push_back(std::move(relative));
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

Result<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return fail<std::string>(ErrorKind::Io, "cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Result<void> write_file_atomic(const fs::path& path, std::string_view content) {
    fs::path temp = path;
    temp += ".srcmark-tmp." + std::to_string(::getpid());
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) return Error{ErrorKind::Io, "cannot write " + temp.string()};
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            std::error_code ec;
            fs::remove(temp, ec);
            return Error{ErrorKind::Io, "cannot write " + temp.string()};
        }
    }
    std::error_code ec;
    // keep the destination's permissions when replacing an existing file
    if (fs::exists(path, ec)) {
        fs::file_status status = fs::status(path, ec);
        if (!ec) fs::permissions(temp, status.permissions(), fs::perm_options::replace, ec);
    }
    fs::rename(temp, path, ec);
    if (ec) {
        fs::remove(temp, ec);
        return Error{ErrorKind::Io, "cannot replace " + path.string()};
    }
    return {};
}

void parallel_for(unsigned jobs, std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
}

}  // namespace srcmark
