#include "refdoc/testdetect.hpp"

#include "refdoc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace refdoc {

namespace {

bool ends_with(std::string_view text, std::string_view suffix) {
    return text.size() >= suffix.size() &&
           text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string lowercase(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

struct Token {
    enum class Kind { Identifier, Annotation, Punct };
    Kind kind;
    std::string text; // annotation text excludes the '@'
    std::size_t line;
};

std::vector<Token> tokenize(std::string_view blanked) {
    std::vector<Token> tokens;
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < blanked.size()) {
        const char c = blanked[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < blanked.size() && is_ident_char(blanked[j])) {
                ++j;
            }
            tokens.push_back({Token::Kind::Identifier, std::string(blanked.substr(i, j - i)),
                              line});
            i = j;
        } else if (c == '@') {
            // Possibly qualified annotation name: @org.junit.Test.
            std::size_t j = i + 1;
            std::string name;
            while (j < blanked.size() &&
                   (is_ident_char(blanked[j]) || blanked[j] == '.')) {
                name.push_back(blanked[j]);
                ++j;
            }
            tokens.push_back({Token::Kind::Annotation, std::move(name), line});
            i = j;
        } else {
            tokens.push_back({Token::Kind::Punct, std::string(1, c), line});
            ++i;
        }
    }
    return tokens;
}

// The last dotted component of an annotation name.
std::string_view annotation_leaf(std::string_view name) {
    const auto dot = name.rfind('.');
    return dot == std::string_view::npos ? name : name.substr(dot + 1);
}

// Keywords that can precede '(' in statement position; never method names.
const std::set<std::string, std::less<>> kStatementKeywords = {
    "if", "for", "while", "switch", "catch", "synchronized",
    "return", "throw", "new", "assert", "super", "this",
};

} // namespace

std::string_view file_kind_name(FileKind kind) {
    switch (kind) {
        case FileKind::Production: return "production";
        case FileKind::Test: return "test";
        case FileKind::Unparseable: return "unparseable";
    }
    return "";
}

bool is_test_filename(const std::string& path) {
    const std::string lowered = lowercase(path);
    if (!ends_with(lowered, ".java")) {
        throw NotJavaFile(path);
    }
    const auto slash = lowered.find_last_of("/\\");
    const std::size_t start = slash == std::string::npos ? 0 : slash + 1;
    const std::string base = lowered.substr(start, lowered.size() - start - 5);
    return base.rfind("test", 0) == 0 || ends_with(base, "test");
}

std::string blank_comments_and_literals(std::string_view source) {
    std::string out;
    out.reserve(source.size());
    enum class State { Code, LineComment, BlockComment, String, Char };
    State state = State::Code;
    std::size_t i = 0;
    while (i < source.size()) {
        const char c = source[i];
        const char next = i + 1 < source.size() ? source[i + 1] : '\0';
        switch (state) {
            case State::Code:
                if (c == '/' && next == '/') {
                    state = State::LineComment;
                    out += "  ";
                    i += 2;
                } else if (c == '/' && next == '*') {
                    state = State::BlockComment;
                    out += "  ";
                    i += 2;
                } else if (c == '"') {
                    state = State::String;
                    out += ' ';
                    ++i;
                } else if (c == '\'') {
                    state = State::Char;
                    out += ' ';
                    ++i;
                } else {
                    out += c;
                    ++i;
                }
                break;
            case State::LineComment:
                if (c == '\n') {
                    state = State::Code;
                    out += '\n';
                } else {
                    out += ' ';
                }
                ++i;
                break;
            case State::BlockComment:
                if (c == '*' && next == '/') {
                    state = State::Code;
                    out += "  ";
                    i += 2;
                } else {
                    out += c == '\n' ? '\n' : ' ';
                    ++i;
                }
                break;
            case State::String:
            case State::Char: {
                const char quote = state == State::String ? '"' : '\'';
                if (c == '\\' && i + 1 < source.size()) {
                    out += "  ";
                    i += 2;
                } else if (c == quote) {
                    state = State::Code;
                    out += ' ';
                    ++i;
                } else {
                    out += c == '\n' ? '\n' : ' ';
                    ++i;
                }
                break;
            }
        }
    }
    return out;
}

TestScanResult scan_java_for_tests(std::string_view source) {
    const std::string blanked = blank_comments_and_literals(source);
    const auto tokens = tokenize(blanked);

    TestScanResult result;

    // Scope tracking: each '{' either opens a type body (when a type
    // declaration is pending) or an ordinary block; method declarations are
    // only recognized directly inside a type body.
    struct Scope {
        bool type_body;
        std::string type_name;
    };
    std::vector<Scope> scopes;
    std::string pending_type; // set after "class Foo" until its '{'

    // Declaration segment: tokens since the last ';', '{' or '}'.
    bool seg_public = false;
    bool seg_test_annotation = false;
    std::size_t seg_annotation_line = 0;
    bool seg_assignment = false;
    const auto reset_segment = [&] {
        seg_public = false;
        seg_test_annotation = false;
        seg_annotation_line = 0;
        seg_assignment = false;
    };

    long depth = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& tok = tokens[i];
        if (tok.kind == Token::Kind::Punct) {
            const char c = tok.text[0];
            if (c == '{') {
                ++depth;
                if (!pending_type.empty()) {
                    scopes.push_back({true, pending_type});
                    pending_type.clear();
                } else {
                    scopes.push_back({false, ""});
                }
                reset_segment();
            } else if (c == '}') {
                --depth;
                if (depth < 0) {
                    result.kind = FileKind::Unparseable;
                    result.evidence.clear();
                    return result;
                }
                if (!scopes.empty()) {
                    scopes.pop_back();
                }
                reset_segment();
            } else if (c == ';') {
                reset_segment();
            } else if (c == '=') {
                seg_assignment = true;
            }
            continue;
        }

        if (tok.kind == Token::Kind::Annotation) {
            if (annotation_leaf(tok.text) == "Test") {
                seg_test_annotation = true;
                seg_annotation_line = tok.line;
            }
            // Skip annotation arguments so their '=' and parens stay out of
            // the declaration segment.
            if (i + 1 < tokens.size() && tokens[i + 1].kind == Token::Kind::Punct &&
                tokens[i + 1].text == "(") {
                long parens = 0;
                std::size_t j = i + 1;
                for (; j < tokens.size(); ++j) {
                    if (tokens[j].kind == Token::Kind::Punct) {
                        if (tokens[j].text == "(") {
                            ++parens;
                        } else if (tokens[j].text == ")") {
                            if (--parens == 0) {
                                break;
                            }
                        }
                    }
                }
                i = j;
            }
            continue;
        }

        // Identifier.
        if (tok.text == "public") {
            seg_public = true;
            continue;
        }
        if (tok.text == "class" || tok.text == "interface" || tok.text == "enum" ||
            tok.text == "record") {
            if (i + 1 < tokens.size() && tokens[i + 1].kind == Token::Kind::Identifier) {
                pending_type = tokens[i + 1].text;
                ++i;
            }
            continue;
        }

        // Candidate declaration: identifier directly followed by '(' inside
        // a type body (or at the top level, for detached snippets), not part
        // of an initializer expression, not a qualified call, not a
        // statement keyword.
        const bool followed_by_paren = i + 1 < tokens.size() &&
                                       tokens[i + 1].kind == Token::Kind::Punct &&
                                       tokens[i + 1].text == "(";
        const bool decl_context = scopes.empty() || scopes.back().type_body;
        if (!followed_by_paren || !decl_context || seg_assignment) {
            continue;
        }
        const bool qualified = i > 0 && tokens[i - 1].kind == Token::Kind::Punct &&
                               tokens[i - 1].text == ".";
        if (qualified || kStatementKeywords.count(tok.text) != 0) {
            continue;
        }

        const bool is_constructor =
            !scopes.empty() && tok.text == scopes.back().type_name;
        if (seg_test_annotation) {
            result.evidence.push_back({"annotation", seg_annotation_line});
        }
        if (seg_public && !is_constructor && tok.text.rfind("test", 0) == 0) {
            result.evidence.push_back({"method-name", tok.line});
        }
    }

    if (depth != 0) {
        result.kind = FileKind::Unparseable;
        result.evidence.clear();
        return result;
    }
    result.kind = result.evidence.empty() ? FileKind::Production : FileKind::Test;
    return result;
}

FileKind classify_file(const std::string& path, std::string_view source) {
    const bool name_gate = is_test_filename(path);
    const auto scan = scan_java_for_tests(source);
    if (scan.kind == FileKind::Unparseable) {
        return FileKind::Unparseable;
    }
    return name_gate && scan.kind == FileKind::Test ? FileKind::Test : FileKind::Production;
}

} // namespace refdoc
