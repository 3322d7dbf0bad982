#include "srcmark/marker.hpp"

#include <algorithm>
#include <cctype>

#include "srcmark/bytes.hpp"

namespace srcmark {

namespace {

bool contains_whitespace(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

bool is_marker_name(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isalnum(c); });
}

bool is_prefix(std::string_view a, std::string_view b) { return b.substr(0, a.size()) == a; }

void append_quoted(std::string& out, std::string_view value) {
    out.push_back('"');
    for (char c : value) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
}

}  // namespace

Result<MarkerSyntax> MarkerSyntax::create(
    std::string line_comment_token, std::string block_prefix,
    std::vector<std::pair<std::string, std::string>> sigil_registry,
    std::vector<std::pair<std::string, std::string>> block_names) {
    if (line_comment_token.empty() || contains_whitespace(line_comment_token))
        return fail<MarkerSyntax>(ErrorKind::Config, "line comment token must be non-empty and free of whitespace");
    if (!block_prefix.starts_with(line_comment_token))
        return fail<MarkerSyntax>(ErrorKind::Config, "block prefix must begin with the line comment token");
    std::string block_tail = block_prefix.substr(line_comment_token.size());
    if (block_tail.empty() || contains_whitespace(block_tail))
        return fail<MarkerSyntax>(ErrorKind::Config,
                                  "block prefix must extend the comment token with non-whitespace characters");

    for (std::size_t i = 0; i < sigil_registry.size(); ++i) {
        const auto& [analyzer, sigil] = sigil_registry[i];
        if (analyzer.empty())
            return fail<MarkerSyntax>(ErrorKind::Config, "sigil registered without an analyzer id");
        if (sigil.empty() || contains_whitespace(sigil))
            return fail<MarkerSyntax>(ErrorKind::Config,
                                      "sigil for '" + analyzer + "' must be non-empty and free of whitespace");
        if (is_prefix(sigil, block_tail))
            return fail<MarkerSyntax>(ErrorKind::Config,
                                      "sigil '" + sigil + "' collides with the block marker prefix");
        for (std::size_t j = 0; j < i; ++j) {
            const auto& [other_analyzer, other_sigil] = sigil_registry[j];
            if (other_analyzer == analyzer)
                return fail<MarkerSyntax>(ErrorKind::Config, "duplicate sigil registration for '" + analyzer + "'");
            if (is_prefix(sigil, other_sigil) || is_prefix(other_sigil, sigil))
                return fail<MarkerSyntax>(ErrorKind::Config, "sigils '" + other_sigil + "' and '" + sigil +
                                                                 "' are not prefix-free");
        }
    }
    for (std::size_t i = 0; i < block_names.size(); ++i) {
        const auto& [analyzer, name] = block_names[i];
        if (analyzer.empty() || !is_marker_name(name))
            return fail<MarkerSyntax>(ErrorKind::Config, "block marker name '" + name + "' is not an identifier");
        for (std::size_t j = 0; j < i; ++j)
            if (block_names[j].second == name)
                return fail<MarkerSyntax>(ErrorKind::Config, "duplicate block marker name '" + name + "'");
    }

    MarkerSyntax syntax;
    syntax.line_comment_token_ = std::move(line_comment_token);
    syntax.block_prefix_ = std::move(block_prefix);
    syntax.sigils_ = std::move(sigil_registry);
    syntax.block_names_ = std::move(block_names);
    return syntax;
}

const MarkerSyntax& MarkerSyntax::standard() {
    static const MarkerSyntax instance = [] {
        auto result = MarkerSyntax::create("//", "//@",
                                           {{"coverage", "+"}},
                                           {{"callers", "Caller"}, {"author", "Author"}});
        return result.value();
    }();
    return instance;
}

const std::string* MarkerSyntax::sigil_for(std::string_view analyzer_id) const {
    for (const auto& [analyzer, sigil] : sigils_)
        if (analyzer == analyzer_id) return &sigil;
    return nullptr;
}

const std::string* MarkerSyntax::analyzer_for_sigil(std::string_view sigil) const {
    for (const auto& [analyzer, registered] : sigils_)
        if (registered == sigil) return &analyzer;
    return nullptr;
}

const std::string* MarkerSyntax::analyzer_for_block_name(std::string_view name) const {
    for (const auto& [analyzer, registered] : block_names_)
        if (registered == name) return &analyzer;
    return nullptr;
}

const std::string* MarkerSyntax::block_name_for(std::string_view analyzer_id) const {
    for (const auto& [analyzer, name] : block_names_)
        if (analyzer == analyzer_id) return &name;
    return nullptr;
}

Result<std::string> encode_line_marker(const LineMarker& marker, const MarkerSyntax& syntax) {
    const std::string* sigil = syntax.sigil_for(marker.analyzer_id);
    if (!sigil)
        return fail<std::string>(ErrorKind::Config,
                                 "analyzer '" + marker.analyzer_id + "' has no registered sigil");
    if (!marker.sigil.empty() && marker.sigil != *sigil)
        return fail<std::string>(ErrorKind::Config, "sigil '" + marker.sigil +
                                                        "' is not the registered sigil of analyzer '" +
                                                        marker.analyzer_id + "'");
    if (marker.payload.find('\n') != std::string::npos)
        return fail<std::string>(ErrorKind::Config, "line marker payload may not contain a newline");

    std::string rendered = " " + syntax.line_comment_token() + *sigil + marker.payload;

    // The payload must not smuggle in another marker suffix; the rendered
    // form has to decode back to exactly this marker.
    auto reparsed = parse_line_marker(rendered, syntax);
    if (!reparsed || !reparsed->first.empty() || reparsed->second.payload != marker.payload ||
        reparsed->second.analyzer_id != marker.analyzer_id)
        return fail<std::string>(ErrorKind::Config,
                                 "payload '" + marker.payload + "' collides with the marker grammar");
    return rendered;
}

std::optional<std::pair<std::string_view, LineMarker>> parse_line_marker(
    std::string_view line, const MarkerSyntax& syntax) {
    if (line.find('\n') != std::string_view::npos) return std::nullopt;
    const std::string introducer = " " + syntax.line_comment_token();

    // Rightmost introducer whose tail names a registered sigil wins; valid
    // payloads cannot contain a further introducer+sigil sequence, so this
    // is the unique decode of anything encode_line_marker produced.
    std::size_t from = std::string_view::npos;
    while (true) {
        std::size_t pos = line.rfind(introducer, from);
        if (pos == std::string_view::npos) return std::nullopt;
        std::string_view rest = line.substr(pos + introducer.size());
        for (const auto& [analyzer, sigil] : syntax.sigil_registry()) {
            if (rest.substr(0, sigil.size()) == sigil) {
                LineMarker marker{analyzer, std::string(rest.substr(sigil.size())), sigil};
                return std::make_pair(line.substr(0, pos), std::move(marker));
            }
        }
        if (pos == 0) return std::nullopt;
        from = pos - 1;
    }
}

Result<std::string> encode_block_marker(const BlockMarker& marker, const MarkerSyntax& syntax) {
    const std::string* registered = syntax.analyzer_for_block_name(marker.name);
    if (!registered || *registered != marker.analyzer_id)
        return fail<std::string>(ErrorKind::Config, "block marker name '" + marker.name +
                                                        "' is not registered for analyzer '" +
                                                        marker.analyzer_id + "'");
    if (!is_marker_name(marker.name))
        return fail<std::string>(ErrorKind::Config, "block marker name '" + marker.name + "' is not an identifier");
    if (marker.indent.find_first_not_of(" \t") != std::string::npos)
        return fail<std::string>(ErrorKind::Config, "block marker indent must be spaces and tabs only");

    std::string rendered = marker.indent + syntax.block_prefix() + " " + marker.name + "(";
    bool first = true;
    for (const auto& [key, value] : marker.args) {
        if (value.find('\n') != std::string::npos)
            return fail<std::string>(ErrorKind::Config, "block marker argument value may not contain a newline");
        if (!key.empty() && !is_identifier(key))
            return fail<std::string>(ErrorKind::Config, "block marker argument key '" + key + "' is not an identifier");
        if (!first) rendered += ", ";
        first = false;
        if (!key.empty()) {
            rendered += key;
            rendered += '=';
        }
        append_quoted(rendered, value);
    }
    rendered += ')';

    auto reparsed = parse_block_marker(rendered, syntax);
    if (!reparsed || !(*reparsed == marker))
        return fail<std::string>(ErrorKind::Config, "block marker does not round-trip through the grammar");
    return rendered;
}

std::optional<BlockMarker> parse_block_marker(std::string_view line, const MarkerSyntax& syntax) {
    if (line.find('\n') != std::string_view::npos) return std::nullopt;
    std::string_view indent = leading_indent(line);
    std::string_view rest = line.substr(indent.size());

    if (!rest.starts_with(syntax.block_prefix())) return std::nullopt;
    rest.remove_prefix(syntax.block_prefix().size());
    if (!rest.starts_with(' ')) return std::nullopt;  // grammar requires a single space
    rest.remove_prefix(1);

    std::size_t name_len = 0;
    while (name_len < rest.size() && std::isalnum(static_cast<unsigned char>(rest[name_len])))
        ++name_len;
    if (name_len == 0 || !std::isalpha(static_cast<unsigned char>(rest[0]))) return std::nullopt;
    std::string_view name = rest.substr(0, name_len);
    rest.remove_prefix(name_len);

    if (!rest.starts_with('(')) return std::nullopt;
    rest.remove_prefix(1);

    std::vector<std::pair<std::string, std::string>> args;
    if (!rest.starts_with(')')) {
        while (true) {
            std::string key;
            if (!rest.empty() && rest.front() != '"') {
                std::size_t key_len = 0;
                while (key_len < rest.size() &&
                       (std::isalnum(static_cast<unsigned char>(rest[key_len])) || rest[key_len] == '_'))
                    ++key_len;
                if (key_len == 0 || !is_identifier(rest.substr(0, key_len))) return std::nullopt;
                key.assign(rest.substr(0, key_len));
                rest.remove_prefix(key_len);
                if (!rest.starts_with('=')) return std::nullopt;
                rest.remove_prefix(1);
            }
            if (!rest.starts_with('"')) return std::nullopt;
            rest.remove_prefix(1);
            std::string value;
            bool closed = false;
            std::size_t i = 0;
            while (i < rest.size()) {
                char c = rest[i];
                if (c == '\\') {
                    if (i + 1 >= rest.size()) return std::nullopt;
                    char escaped = rest[i + 1];
                    if (escaped != '\\' && escaped != '"') return std::nullopt;
                    value.push_back(escaped);
                    i += 2;
                } else if (c == '"') {
                    closed = true;
                    ++i;
                    break;
                } else {
                    value.push_back(c);
                    ++i;
                }
            }
            if (!closed) return std::nullopt;
            rest.remove_prefix(i);
            args.emplace_back(std::move(key), std::move(value));
            if (rest.starts_with(", ")) {
                rest.remove_prefix(2);
                continue;
            }
            break;
        }
    }
    if (!rest.starts_with(')')) return std::nullopt;
    rest.remove_prefix(1);
    if (!rest.empty()) return std::nullopt;

    const std::string* analyzer = syntax.analyzer_for_block_name(name);
    if (!analyzer) return std::nullopt;
    return BlockMarker{*analyzer, std::string(name), std::move(args), std::string(indent)};
}

std::vector<Collision> scan_collisions(std::string_view content, const MarkerSyntax& syntax) {
    std::vector<Collision> hits;
    std::vector<Line> lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (parse_line_marker(lines[i].content, syntax))
            hits.push_back({i + 1, MarkerGrammar::Line});
        else if (parse_block_marker(lines[i].content, syntax))
            hits.push_back({i + 1, MarkerGrammar::Block});
    }
    return hits;
}

}  // namespace srcmark
