#include <doctest.h>

#include <cctype>
#include <regex>

#include "srcmark/bytes.hpp"
#include "srcmark/decl_scan.hpp"

using namespace srcmark;

namespace {

const LangProfile& java() { return LangProfile::java(); }

const Declaration* find_decl(const std::vector<Declaration>& decls, std::string_view path) {
    for (const Declaration& d : decls)
        if (d.qualified_path == path) return &d;
    return nullptr;
}

}  // namespace

TEST_CASE("scans a class with a method and computes spans") {
    std::string source =
        "public class Math {\n"
        "  public void multiply(int a, int b) {\n"
        "    int c = a * b;\n"
        "  }\n"
        "}\n";
    auto decls = scan_declarations(source, java());
    REQUIRE(decls.ok());
    REQUIRE(decls->size() == 2);

    const Declaration& cls = (*decls)[0];
    CHECK(cls.kind == DeclKind::Class);
    CHECK(cls.name == "Math");
    CHECK(cls.qualified_path == "Math");
    CHECK(cls.header_line == 1);
    CHECK(cls.body_span == std::pair<std::size_t, std::size_t>{1, 5});
    CHECK(cls.indent.empty());

    const Declaration& method = (*decls)[1];
    CHECK(method.kind == DeclKind::Method);
    CHECK(method.name == "multiply");
    CHECK(method.qualified_path == "Math.multiply");
    CHECK(method.header_line == 2);
    CHECK(method.body_span == std::pair<std::size_t, std::size_t>{2, 4});
    CHECK(method.indent == "  ");
}

TEST_CASE("empty file yields no declarations") {
    auto decls = scan_declarations("", java());
    REQUIRE(decls.ok());
    CHECK(decls->empty());
}

TEST_CASE("braces inside strings and comments are not structure") {
    std::string source = "String s = \"{\"; // {\n/* { */\n";
    auto decls = scan_declarations(source, java());
    REQUIRE(decls.ok());
    CHECK(decls->empty());

    std::string tricky =
        "class A {\n"
        "  void f() {\n"
        "    String s = \"} } {\";\n"
        "    char c = '{';\n"
        "    // } stray in comment\n"
        "    /* } another } */\n"
        "  }\n"
        "}\n";
    auto tricky_decls = scan_declarations(tricky, java());
    REQUIRE(tricky_decls.ok());
    REQUIRE(tricky_decls->size() == 2);
    CHECK((*tricky_decls)[1].body_span == std::pair<std::size_t, std::size_t>{2, 7});
}

TEST_CASE("scan errors carry the offending line") {
    auto unbalanced = scan_declarations("class A {\n  void f() {\n}\n", java());
    REQUIRE(!unbalanced.ok());
    CHECK(unbalanced.error().kind == ErrorKind::Scan);
    CHECK(unbalanced.error().message.find("line 1") != std::string::npos);

    auto stray = scan_declarations("}\n", java());
    REQUIRE(!stray.ok());
    CHECK(stray.error().message.find("line 1") != std::string::npos);

    auto comment = scan_declarations("/* never closed\n\n", java());
    REQUIRE(!comment.ok());
    CHECK(comment.error().message.find("line 1") != std::string::npos);

    auto literal = scan_declarations("class A {\n  String s = \"oops;\n}\n", java());
    REQUIRE(!literal.ok());
    CHECK(literal.error().message.find("line 2") != std::string::npos);
}

TEST_CASE("call sites are attributed to the innermost enclosing method") {
    std::string source =
        "class Mat {\n"
        "  void square(int x) {\n"
        "    multiply(x, x);\n"
        "  }\n"
        "  void fact(int n) {\n"
        "    if (n > 1) {\n"
        "      multiply(n, fact(n));\n"
        "    }\n"
        "  }\n"
        "}\n";
    auto decls = scan_declarations(source, java());
    REQUIRE(decls.ok());
    auto calls = scan_call_sites(source, java(), *decls);
    REQUIRE(calls.ok());

    REQUIRE(calls->size() == 3);
    CHECK((*calls)[0].callee_name == "multiply");
    CHECK((*calls)[0].enclosing == "Mat.square");
    CHECK((*calls)[0].line == 3);
    CHECK((*calls)[1].callee_name == "multiply");
    CHECK((*calls)[1].enclosing == "Mat.fact");
    CHECK((*calls)[2].callee_name == "fact");
    CHECK((*calls)[2].enclosing == "Mat.fact");
}

TEST_CASE("keywords before '(' are not calls") {
    std::string source =
        "class A {\n"
        "  void f(boolean x) {\n"
        "    while (x) { g(); }\n"
        "    for (int i = 0; i < 3; i = i + 1) { }\n"
        "    if (x) { return; }\n"
        "    switch (0) { }\n"
        "  }\n"
        "}\n";
    auto decls = scan_declarations(source, java());
    REQUIRE(decls.ok());
    auto calls = scan_call_sites(source, java(), *decls);
    REQUIRE(calls.ok());

    // oracle: hand token scan of the body — the only identifier immediately
    // followed by '(' that is neither a keyword nor a header is `g`
    REQUIRE(calls->size() == 1);
    CHECK((*calls)[0].callee_name == "g");
    CHECK((*calls)[0].enclosing == "A.f");
}

TEST_CASE("constructor names after new are skipped") {
    std::string source =
        "class A {\n"
        "  void f() {\n"
        "    Object o = new Object();\n"
        "    Object p = new java.util.ArrayList();\n"
        "    g(new B(), h());\n"
        "  }\n"
        "}\n";
    auto decls = scan_declarations(source, java());
    REQUIRE(decls.ok());
    auto calls = scan_call_sites(source, java(), *decls);
    REQUIRE(calls.ok());
    REQUIRE(calls->size() == 2);
    CHECK((*calls)[0].callee_name == "g");
    CHECK((*calls)[1].callee_name == "h");
}

TEST_CASE("method with an empty body has no call sites") {
    std::string source = "class A {\n  void f() {\n  }\n}\n";
    auto decls = scan_declarations(source, java());
    REQUIRE(decls.ok());
    auto calls = scan_call_sites(source, java(), *decls);
    REQUIRE(calls.ok());
    CHECK(calls->empty());
}

TEST_CASE("nested classes qualify paths and nest spans laminarly") {
    std::string source =
        "class Outer {\n"
        "  class Inner {\n"
        "    void deep() {\n"
        "      helper();\n"
        "    }\n"
        "  }\n"
        "  void shallow() {\n"
        "  }\n"
        "}\n";
    auto decls = scan_declarations(source, java());
    REQUIRE(decls.ok());
    REQUIRE(decls->size() == 4);
    CHECK(find_decl(*decls, "Outer"));
    CHECK(find_decl(*decls, "Outer.Inner"));
    CHECK(find_decl(*decls, "Outer.Inner.deep"));
    CHECK(find_decl(*decls, "Outer.shallow"));

    // laminar family: any two spans are disjoint or nested
    for (const Declaration& a : *decls)
        for (const Declaration& b : *decls) {
            if (&a == &b) continue;
            auto [a1, a2] = a.body_span;
            auto [b1, b2] = b.body_span;
            bool disjoint = a2 < b1 || b2 < a1;
            bool a_in_b = b1 <= a1 && a2 <= b2;
            bool b_in_a = a1 <= b1 && b2 <= a2;
            CHECK((disjoint || a_in_b || b_in_a));
        }

    auto calls = scan_call_sites(source, java(), *decls);
    REQUIRE(calls.ok());
    REQUIRE(calls->size() == 1);
    CHECK((*calls)[0].enclosing == "Outer.Inner.deep");
}

TEST_CASE("field initializer calls attach to the class") {
    std::string source =
        "class A {\n"
        "  int x = init();\n"
        "  void f() {\n"
        "  }\n"
        "}\n";
    auto decls = scan_declarations(source, java());
    REQUIRE(decls.ok());
    REQUIRE(decls->size() == 2);  // the initializer call is not a method
    auto calls = scan_call_sites(source, java(), *decls);
    REQUIRE(calls.ok());
    REQUIRE(calls->size() == 1);
    CHECK((*calls)[0].callee_name == "init");
    CHECK((*calls)[0].enclosing == "A");
}

TEST_CASE("multi-line headers and throws clauses") {
    std::string source =
        "class A {\n"
        "  public int compute(int a,\n"
        "                     int b) throws Exception, Error {\n"
        "    return combine(a, b);\n"
        "  }\n"
        "}\n";
    auto decls = scan_declarations(source, java());
    REQUIRE(decls.ok());
    const Declaration* method = find_decl(*decls, "A.compute");
    REQUIRE(method);
    CHECK(method->header_line == 2);
    CHECK(method->body_span == std::pair<std::size_t, std::size_t>{2, 5});

    auto calls = scan_call_sites(source, java(), *decls);
    REQUIRE(calls.ok());
    REQUIRE(calls->size() == 1);
    CHECK((*calls)[0].callee_name == "combine");
}

TEST_CASE("every call site names a scanned declaration") {
    std::string source =
        "class A {\n"
        "  int seed = make();\n"
        "  void f() { g(); }\n"
        "  class B {\n"
        "    void h() { f(); }\n"
        "  }\n"
        "}\n";
    auto scan = scan_file(source, java());
    REQUIRE(scan.ok());
    for (const CallSite& call : scan->call_sites) {
        bool found = false;
        for (const Declaration& decl : scan->declarations)
            if (decl.qualified_path == call.enclosing) found = true;
        CHECK(found);
    }
}

TEST_CASE("header lines agree with a line-by-line regex oracle") {
    const std::vector<std::string> corpus = {
        "class Alpha {\n"
        "  void one() {\n"
        "    two();\n"
        "  }\n"
        "  void two() {\n"
        "  }\n"
        "}\n",
        "public class Beta {\n"
        "  public int three(int x) {\n"
        "    return x;\n"
        "  }\n"
        "}\n",
        "class Gamma {\n"
        "  void four() { }\n"
        "  void five() { four(); }\n"
        "}\n",
    };

    // independent oracle: regexes over raw lines
    std::regex class_re(R"(^\s*(?:public\s+)?class\s+(\w+))");
    std::regex method_re(R"(^\s*(?:public\s+)?(?:int|void)\s+(\w+)\s*\()");

    for (const std::string& source : corpus) {
        std::vector<std::pair<std::string, std::size_t>> expected;
        auto lines = split_lines(source);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            std::smatch match;
            std::string line(lines[i].content);
            if (std::regex_search(line, match, class_re))
                expected.emplace_back(match[1], i + 1);
            else if (std::regex_search(line, match, method_re))
                expected.emplace_back(match[1], i + 1);
        }

        auto decls = scan_declarations(source, java());
        REQUIRE(decls.ok());
        REQUIRE(decls->size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK((*decls)[i].name == expected[i].first);
            CHECK((*decls)[i].header_line == expected[i].second);
        }
    }
}

TEST_CASE("scan_call_sites rejects declarations from different content") {
    std::string source = "class A {\n  void f() { g(); }\n}\n";
    std::string other = "class B {\n  void h() { }\n}\n";
    auto other_decls = scan_declarations(other, java());
    REQUIRE(other_decls.ok());
    auto calls = scan_call_sites(source, java(), *other_decls);
    REQUIRE(!calls.ok());
    CHECK(calls.error().kind == ErrorKind::Scan);
}
