#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace refdoc {

enum class FileKind { Production, Test, Unparseable };

std::string_view file_kind_name(FileKind kind);

struct TestEvidence {
    std::string reason; // "annotation" or "method-name"
    std::size_t line = 0;
};

struct TestScanResult {
    FileKind kind = FileKind::Production;
    std::vector<TestEvidence> evidence; // non-empty iff kind == Test
};

// Filename gate: the extension-stripped base name, lowercased, starts or
// ends with "test". Interior occurrences never count. Throws NotJavaFile
// when the path does not end in ".java".
bool is_test_filename(const std::string& path);

// Replaces the contents of comments and string/char literals with spaces,
// keeping newlines so line numbers survive.
std::string blank_comments_and_literals(std::string_view source);

// Method-scan gate: after blanking, a file is a test file iff an @Test
// annotation immediately precedes a method declaration, or a public
// non-constructor method's name starts with "test". Files whose brace
// nesting never balances come back unparseable.
TestScanResult scan_java_for_tests(std::string_view source);

// Both gates combined: test iff the filename gate and the method gate both
// pass; unparseable sources stay unparseable. Throws NotJavaFile for paths
// without a ".java" extension.
FileKind classify_file(const std::string& path, std::string_view source);

} // namespace refdoc
