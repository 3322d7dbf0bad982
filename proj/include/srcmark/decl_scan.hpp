#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "srcmark/error.hpp"

namespace srcmark {

// Lexical rules for a language with one-line comments. The keyword set lists
// identifiers that may precede "(" without being calls (if, while, ...);
// "new" additionally suppresses the constructor name that follows it.
struct LangProfile {
    std::string name;
    std::string line_comment_token;
    std::pair<std::string, std::string> block_comment_delimiters;
    std::string string_delimiters;  // each character opens/closes a literal
    std::unordered_set<std::string> keyword_set;

    static const LangProfile& java();
};

enum class DeclKind { Class, Method };

struct Declaration {
    DeclKind kind = DeclKind::Class;
    std::string name;
    std::string qualified_path;  // e.g. "Outer.Inner.method"
    std::size_t header_line = 0;
    std::pair<std::size_t, std::size_t> body_span{0, 0};  // inclusive, contains header_line
    std::string indent;
};

struct CallSite {
    std::string callee_name;
    std::size_t line = 0;
    std::string enclosing;  // qualified path of the containing method or class
};

struct FileScan {
    std::vector<Declaration> declarations;
    std::vector<CallSite> call_sites;
};

// Single-pass token scan: brace-depth tracking with string literals and
// comments skipped. Classes are `class <name> ... {`; methods are
// non-keyword identifiers followed by "(...)" and then "{" directly inside a
// class body. Call sites are identifiers immediately followed by "(" outside
// declaration headers, attributed to the innermost enclosing declaration.
Result<FileScan> scan_file(std::string_view content, const LangProfile& profile);

Result<std::vector<Declaration>> scan_declarations(std::string_view content,
                                                   const LangProfile& profile);

// `decls` must come from scan_declarations on the same content.
Result<std::vector<CallSite>> scan_call_sites(std::string_view content, const LangProfile& profile,
                                              std::span<const Declaration> decls);

}  // namespace srcmark
