#include "srcmark/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "srcmark/bytes.hpp"

namespace srcmark {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_list(std::string_view value) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        std::size_t comma = value.find(',', pos);
        std::string_view field =
            trim(value.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                   : comma - pos));
        if (!field.empty()) out.emplace_back(field);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

Error config_error(const std::filesystem::path& path, std::size_t line, std::string message) {
    return {ErrorKind::Config,
            path.string() + ":" + std::to_string(line) + ": " + std::move(message)};
}

}  // namespace

const char* style_name(MarkerStyle style) {
    return style == MarkerStyle::Native ? "native" : "comment";
}

const char* mode_name(CoverageMode mode) {
    return mode == CoverageMode::Full ? "full" : "counts";
}

ToolConfig default_config(std::filesystem::path project_root) {
    ToolConfig config;
    config.project_root = std::move(project_root);
    return config;
}

Result<ToolConfig> load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return fail<ToolConfig>(ErrorKind::Config, "cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    ToolConfig config;
    bool have_root = false;
    std::string section;  // "" = top level, otherwise analyzer id
    std::set<std::string> seen_scalars;

    std::vector<Line> lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_number = i + 1;
        std::string_view line = trim(lines[i].content);
        if (line.empty() || line.front() == '#') continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                return config_error(path, line_number, "malformed section header");
            std::string_view name = trim(line.substr(1, line.size() - 2));
            if (!name.starts_with("analyzer."))
                return config_error(path, line_number,
                                    "unknown section '" + std::string(name) + "'");
            std::string id(name.substr(9));
            if (!find_analyzer(id))
                return config_error(path, line_number, "unknown analyzer '" + id + "'");
            section = id;
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            return config_error(path, line_number, "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) return config_error(path, line_number, "empty key");

        const std::string scalar_id = section.empty() ? key : section + "." + key;
        auto scalar_once = [&]() -> std::optional<Error> {
            if (!seen_scalars.insert(scalar_id).second)
                return config_error(path, line_number, "duplicate key '" + key + "'");
            return std::nullopt;
        };

        if (section.empty()) {
            if (key == "project_root") {
                if (auto err = scalar_once()) return *err;
                config.project_root = value;
                have_root = true;
            } else if (key == "lang_profile") {
                if (auto err = scalar_once()) return *err;
                config.lang_profile = value;
            } else if (key == "analyzers") {
                for (std::string& id : split_list(value))
                    config.active_analyzers.push_back(std::move(id));
            } else if (key == "include") {
                for (std::string& glob : split_list(value))
                    config.include_globs.push_back(std::move(glob));
            } else if (key == "exclude") {
                for (std::string& glob : split_list(value))
                    config.exclude_globs.push_back(std::move(glob));
            } else if (key == "targets") {
                for (std::string& target : split_list(value))
                    config.targets.push_back(std::move(target));
            } else if (key == "style") {
                if (auto err = scalar_once()) return *err;
                if (value == "comment")
                    config.marker_style = MarkerStyle::Comment;
                else if (value == "native")
                    config.marker_style = MarkerStyle::Native;
                else
                    return config_error(path, line_number,
                                        "style must be 'comment' or 'native', got '" + value + "'");
            } else if (key == "jobs") {
                if (auto err = scalar_once()) return *err;
                if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
                    return config_error(path, line_number, "jobs must be a positive integer");
                unsigned long parsed = std::stoul(value);
                if (parsed < 1) return config_error(path, line_number, "jobs must be >= 1");
                config.jobs = static_cast<unsigned>(parsed);
            } else {
                return config_error(path, line_number, "unknown key '" + key + "'");
            }
        } else if (section == "coverage") {
            if (key == "report") {
                if (auto err = scalar_once()) return *err;
                config.coverage_report = value;
            } else if (key == "mode") {
                if (auto err = scalar_once()) return *err;
                if (value == "counts")
                    config.coverage_mode = CoverageMode::Counts;
                else if (value == "full")
                    config.coverage_mode = CoverageMode::Full;
                else
                    return config_error(path, line_number,
                                        "mode must be 'counts' or 'full', got '" + value + "'");
            } else {
                return config_error(path, line_number,
                                    "unknown key '" + key + "' in [analyzer.coverage]");
            }
        } else {
            return config_error(path, line_number,
                                "analyzer '" + section + "' takes no configuration keys");
        }
    }

    if (!have_root)
        return fail<ToolConfig>(ErrorKind::Config,
                                path.string() + ": missing required key 'project_root'");
    return config;
}

void apply_overrides(ToolConfig& config, const CliOverrides& overrides) {
    if (overrides.jobs) config.jobs = *overrides.jobs;
    if (overrides.style) config.marker_style = *overrides.style;
    if (overrides.coverage_mode) config.coverage_mode = *overrides.coverage_mode;
    if (!overrides.only_globs.empty()) config.include_globs = overrides.only_globs;
    if (!overrides.targets.empty()) config.targets = overrides.targets;
    if (!overrides.analyzers.empty()) config.active_analyzers = overrides.analyzers;
}

Result<void> validate_config(ToolConfig& config) {
    std::error_code ec;
    if (config.project_root.empty() || !std::filesystem::is_directory(config.project_root, ec))
        return Error{ErrorKind::Config,
                     "project root does not exist: " + config.project_root.string()};
    config.project_root = std::filesystem::absolute(config.project_root).lexically_normal();

    if (config.lang_profile != "java")
        return Error{ErrorKind::Config, "unknown language profile '" + config.lang_profile +
                                            "' (built-in profiles: java)"};

    std::set<std::string> seen;
    for (const std::string& id : config.active_analyzers) {
        if (!find_analyzer(id))
            return Error{ErrorKind::Config, "unknown analyzer '" + id + "'"};
        if (!seen.insert(id).second)
            return Error{ErrorKind::Config, "analyzer '" + id + "' activated twice"};
    }

    const bool coverage_active =
        std::find(config.active_analyzers.begin(), config.active_analyzers.end(), "coverage") !=
        config.active_analyzers.end();
    if (coverage_active && config.coverage_report.empty())
        return Error{ErrorKind::Config,
                     "the coverage analyzer is active but no coverage report is configured "
                     "([analyzer.coverage] report = <path>)"};

    if (config.jobs == 0) {
        config.jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    if (config.include_globs.empty()) config.include_globs = {"*.java"};
    return {};
}

}  // namespace srcmark
