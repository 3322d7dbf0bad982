#include "srcmark/decl_scan.hpp"

#include <cctype>
#include <optional>

#include "srcmark/bytes.hpp"

namespace srcmark {

namespace {

bool ident_start(char c) {
    unsigned char uc = static_cast<unsigned char>(c);
    return std::isalpha(uc) || c == '_' || c == '$';
}

bool ident_char(char c) {
    unsigned char uc = static_cast<unsigned char>(c);
    return std::isalnum(uc) || c == '_' || c == '$';
}

struct Token {
    enum class Kind { Identifier, Punct } kind;
    std::string_view text;
    std::size_t line;
};

Result<std::vector<Token>> lex(std::string_view content, const LangProfile& profile) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    std::size_t line = 1;
    const std::string& lc = profile.line_comment_token;
    const auto& [bc_open, bc_close] = profile.block_comment_delimiters;

    while (i < content.size()) {
        char c = content[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (!lc.empty() && content.substr(i, lc.size()) == lc) {
            std::size_t nl = content.find('\n', i);
            if (nl == std::string_view::npos) break;
            i = nl;  // newline handled above
            continue;
        }
        if (!bc_open.empty() && content.substr(i, bc_open.size()) == bc_open) {
            std::size_t open_line = line;
            std::size_t j = i + bc_open.size();
            while (j < content.size() && content.substr(j, bc_close.size()) != bc_close) {
                if (content[j] == '\n') ++line;
                ++j;
            }
            if (j >= content.size())
                return fail<std::vector<Token>>(
                    ErrorKind::Scan, "unterminated block comment starting at line " +
                                         std::to_string(open_line));
            i = j + bc_close.size();
            continue;
        }
        if (profile.string_delimiters.find(c) != std::string::npos) {
            std::size_t open_line = line;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < content.size()) {
                if (content[j] == '\\') {
                    j += 2;
                    continue;
                }
                if (content[j] == '\n') break;
                if (content[j] == c) {
                    closed = true;
                    break;
                }
                ++j;
            }
            if (!closed)
                return fail<std::vector<Token>>(ErrorKind::Scan,
                                                "unterminated string literal at line " +
                                                    std::to_string(open_line));
            i = j + 1;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < content.size() && ident_char(content[j])) ++j;
            tokens.push_back({Token::Kind::Identifier, content.substr(i, j - i), line});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i + 1;
            while (j < content.size() && ident_char(content[j])) ++j;
            i = j;  // numeric literals carry no structure we need
            continue;
        }
        tokens.push_back({Token::Kind::Punct, content.substr(i, 1), line});
        ++i;
    }
    return tokens;
}

bool is_punct(const Token& t, char c) {
    return t.kind == Token::Kind::Punct && t.text.size() == 1 && t.text[0] == c;
}

struct ScopeFrame {
    enum class Kind { Plain, Class, Method } kind = Kind::Plain;
    std::size_t decl_index = 0;
};

class Walker {
public:
    Walker(std::string_view content, const LangProfile& profile)
        : profile_(profile), lines_(split_lines(content)) {}

    Result<FileScan> run(std::span<const Token> tokens) {
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const Token& t = tokens[i];
            if (t.kind == Token::Kind::Punct) {
                if (is_punct(t, '{')) {
                    open_brace(t);
                } else if (is_punct(t, '}')) {
                    if (scopes_.empty())
                        return fail<FileScan>(ErrorKind::Scan, "extraneous '}' at line " +
                                                                   std::to_string(t.line));
                    close_brace(t);
                }
                continue;
            }
            if (t.text == "class") {
                if (auto jump = try_class_header(tokens, i)) {
                    i = *jump - 1;  // next iteration lands on the opening '{'
                    continue;
                }
                continue;
            }
            if (profile_.keyword_set.count(std::string(t.text))) {
                if (t.text == "new") i = skip_constructor_name(tokens, i);
                continue;
            }
            if (i + 1 < tokens.size() && is_punct(tokens[i + 1], '(')) {
                if (auto jump = try_method_header(tokens, i)) {
                    i = *jump - 1;
                    continue;
                }
                record_call(t);
            }
        }
        if (!scopes_.empty())
            return fail<FileScan>(ErrorKind::Scan,
                                  "unbalanced '{' opened at line " +
                                      std::to_string(open_lines_.back()) +
                                      " is never closed");
        return std::move(scan_);
    }

private:
    void open_brace(const Token& t) {
        ScopeFrame frame = pending_ ? *pending_ : ScopeFrame{};
        pending_.reset();
        scopes_.push_back(frame);
        open_lines_.push_back(t.line);
    }

    void close_brace(const Token& t) {
        ScopeFrame frame = scopes_.back();
        scopes_.pop_back();
        open_lines_.pop_back();
        if (frame.kind != ScopeFrame::Kind::Plain)
            scan_.declarations[frame.decl_index].body_span.second = t.line;
    }

    // Returns the token index of the body '{' when a class header matched.
    std::optional<std::size_t> try_class_header(std::span<const Token> tokens, std::size_t i) {
        if (pending_) return std::nullopt;
        std::size_t j = i + 1;
        if (j >= tokens.size() || tokens[j].kind != Token::Kind::Identifier ||
            profile_.keyword_set.count(std::string(tokens[j].text)))
            return std::nullopt;
        std::string_view name = tokens[j].text;
        std::size_t k = j + 1;
        while (k < tokens.size() && !is_punct(tokens[k], '{') && !is_punct(tokens[k], ';') &&
               !is_punct(tokens[k], '}') && !is_punct(tokens[k], '('))
            ++k;
        if (k >= tokens.size() || !is_punct(tokens[k], '{')) return std::nullopt;
        push_declaration(DeclKind::Class, name, tokens[i].line);
        return k;
    }

    std::optional<std::size_t> try_method_header(std::span<const Token> tokens, std::size_t i) {
        if (pending_) return std::nullopt;
        if (scopes_.empty() || scopes_.back().kind != ScopeFrame::Kind::Class) return std::nullopt;
        std::size_t j = i + 1;  // the '('
        int depth = 0;
        for (; j < tokens.size(); ++j) {
            if (is_punct(tokens[j], '(')) ++depth;
            else if (is_punct(tokens[j], ')') && --depth == 0) break;
        }
        if (j >= tokens.size()) return std::nullopt;
        std::size_t k = j + 1;  // allow `throws A, B` between ')' and '{'
        while (k < tokens.size() &&
               (tokens[k].kind == Token::Kind::Identifier || is_punct(tokens[k], ',')))
            ++k;
        if (k >= tokens.size() || !is_punct(tokens[k], '{')) return std::nullopt;
        push_declaration(DeclKind::Method, tokens[i].text, tokens[i].line);
        return k;
    }

    void push_declaration(DeclKind kind, std::string_view name, std::size_t header_line) {
        std::string qualified;
        for (const ScopeFrame& frame : scopes_)
            if (frame.kind == ScopeFrame::Kind::Class)
                qualified += scan_.declarations[frame.decl_index].name + ".";
        qualified += name;

        Declaration decl;
        decl.kind = kind;
        decl.name.assign(name);
        decl.qualified_path = std::move(qualified);
        decl.header_line = header_line;
        decl.body_span = {header_line, header_line};
        if (header_line - 1 < lines_.size())
            decl.indent.assign(leading_indent(lines_[header_line - 1].content));
        scan_.declarations.push_back(std::move(decl));
        pending_ = ScopeFrame{kind == DeclKind::Class ? ScopeFrame::Kind::Class
                                                      : ScopeFrame::Kind::Method,
                              scan_.declarations.size() - 1};
    }

    void record_call(const Token& t) {
        for (std::size_t s = scopes_.size(); s-- > 0;) {
            if (scopes_[s].kind == ScopeFrame::Kind::Method) {
                scan_.call_sites.push_back(
                    {std::string(t.text), t.line,
                     scan_.declarations[scopes_[s].decl_index].qualified_path});
                return;
            }
        }
        for (std::size_t s = scopes_.size(); s-- > 0;) {
            if (scopes_[s].kind == ScopeFrame::Kind::Class) {
                scan_.call_sites.push_back(
                    {std::string(t.text), t.line,
                     scan_.declarations[scopes_[s].decl_index].qualified_path});
                return;
            }
        }
        // outside any declaration: dropped
    }

    // `new Foo.Bar(...)` — the constructor name is not a call site.
    std::size_t skip_constructor_name(std::span<const Token> tokens, std::size_t i) {
        std::size_t j = i;
        while (j + 1 < tokens.size() && tokens[j + 1].kind == Token::Kind::Identifier) {
            ++j;
            if (j + 1 < tokens.size() && is_punct(tokens[j + 1], '.'))
                ++j;
            else
                break;
        }
        return j;
    }

    const LangProfile& profile_;
    std::vector<Line> lines_;
    FileScan scan_;
    std::vector<ScopeFrame> scopes_;
    std::vector<std::size_t> open_lines_;
    std::optional<ScopeFrame> pending_;
};

}  // namespace

const LangProfile& LangProfile::java() {
    static const LangProfile profile{
        "java",
        "//",
        {"/*", "*/"},
        "\"'",
        {"abstract", "assert",  "boolean",   "break",      "byte",   "case",       "catch",
         "char",     "class",   "continue",  "default",    "do",     "double",     "else",
         "enum",     "extends", "final",     "finally",    "float",  "for",        "if",
         "implements", "import", "instanceof", "int",      "interface", "long",    "native",
         "new",      "null",    "package",   "private",    "protected", "public",  "return",
         "short",    "static",  "strictfp",  "super",      "switch", "synchronized", "this",
         "throw",    "throws",  "transient", "true",       "false",  "try",        "void",
         "volatile", "while"},
    };
    return profile;
}

Result<FileScan> scan_file(std::string_view content, const LangProfile& profile) {
    Result<std::vector<Token>> tokens = lex(content, profile);
    if (!tokens) return tokens.error();
    Walker walker(content, profile);
    return walker.run(*tokens);
}

Result<std::vector<Declaration>> scan_declarations(std::string_view content,
                                                   const LangProfile& profile) {
    Result<FileScan> scan = scan_file(content, profile);
    if (!scan) return scan.error();
    return std::move(scan->declarations);
}

Result<std::vector<CallSite>> scan_call_sites(std::string_view content, const LangProfile& profile,
                                              std::span<const Declaration> decls) {
    Result<FileScan> scan = scan_file(content, profile);
    if (!scan) return scan.error();
    if (decls.size() != scan->declarations.size())
        return fail<std::vector<CallSite>>(
            ErrorKind::Scan, "declaration list does not match a scan of this content");
    for (std::size_t i = 0; i < decls.size(); ++i)
        if (decls[i].qualified_path != scan->declarations[i].qualified_path)
            return fail<std::vector<CallSite>>(
                ErrorKind::Scan, "declaration list does not match a scan of this content");
    return std::move(scan->call_sites);
}

}  // namespace srcmark
