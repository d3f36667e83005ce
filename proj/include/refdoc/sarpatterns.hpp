#pragma once

#include "refdoc/corpus.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refdoc {

enum class PatternScope { Generic, BugFix, CodeSmell, ExternalQA, Functional, InternalQA };

std::string_view pattern_scope_name(PatternScope scope);
std::optional<PatternScope> parse_pattern_scope(std::string_view name);

// One word of a pattern: an exact lowercase word, or with `prefix` set a
// word-start-anchored stem that matches any run of zero or more further
// letters ("renam*" matches "rename", "renamed", "renaming").
struct WordTemplate {
    std::string stem;
    bool prefix = false;
};

struct SarPattern {
    std::string text; // template as written in the catalog
    PatternScope scope = PatternScope::Generic;
    // Word sequences that count as a match; a fused CamelCase template
    // ("CleanUp") carries its space-split form as a second alternative.
    std::vector<std::vector<WordTemplate>> alternatives;
    std::optional<bool> significant;
};

struct PatternCatalog {
    std::vector<SarPattern> patterns;
    std::string version;
};

// Parses one template. Throws MalformedTemplate when a word is empty,
// contains a non-letter, or has '*' anywhere but the final position.
SarPattern compile_pattern(const std::string& template_text,
                           PatternScope scope = PatternScope::Generic);

// Loads "scope<TAB>template[<TAB>significant]" lines; '#' comments and blank
// lines are skipped, and a "# version:" header line fills `version`.
PatternCatalog load_pattern_catalog(const std::string& path);

// Lowercases and splits a message into letter runs; every non-letter
// character separates words.
std::vector<std::string> message_words(std::string_view message);

bool pattern_matches(const SarPattern& pattern, const std::vector<std::string>& words);

// Indices (ascending) of the catalog patterns the message matches; each
// pattern is reported at most once however often it occurs.
std::vector<std::size_t> scan_message(std::string_view message, const PatternCatalog& catalog);

// Sorted distinct project ids across both corpora: the slot order used by
// occurrence vectors.
std::vector<std::string> project_universe(const std::vector<CommitRecord>& a,
                                          const std::vector<CommitRecord>& b);

// Per-project match counts for one pattern in each corpus, aligned to
// project_universe order.
struct OccurrencePair {
    std::vector<double> refactoring;
    std::vector<double> nonrefactoring;
};

std::vector<OccurrencePair> occurrence_vectors(
    const PatternCatalog& catalog,
    const std::vector<CommitRecord>& refactoring_corpus,
    const std::vector<CommitRecord>& nonrefactoring_corpus);

// Flags each pattern significant when the one-sided Mann-Whitney test
// (refactoring counts greater) yields p < alpha; every pattern is kept and
// gets an explicit flag. Throws Error when `pairs` is not aligned with the
// catalog.
PatternCatalog significance_filter(const PatternCatalog& catalog,
                                   const std::vector<OccurrencePair>& pairs,
                                   double alpha = 0.05);

struct LabelSplit {
    std::size_t labeled = 0;
    std::size_t unlabeled = 0;
};

// Per refactoring kind: how many operations sit in commits whose message
// matches at least one pattern of `patternset`, versus the rest.
std::map<std::string, LabelSplit> label_split(const std::vector<RefactoringCommit>& refcommits,
                                              const std::vector<SarPattern>& patternset);

} // namespace refdoc
