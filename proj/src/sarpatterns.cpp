#include "refdoc/sarpatterns.hpp"

#include "refdoc/errors.hpp"
#include "refdoc/stats.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace refdoc {

namespace {

constexpr std::array<std::pair<PatternScope, std::string_view>, 6> kScopeNames = {{
    {PatternScope::Generic, "generic"},
    {PatternScope::BugFix, "BugFix"},
    {PatternScope::CodeSmell, "CodeSmell"},
    {PatternScope::ExternalQA, "ExternalQA"},
    {PatternScope::Functional, "Functional"},
    {PatternScope::InternalQA, "InternalQA"},
}};

bool is_ascii_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

// Validates one raw template word and returns it as a WordTemplate; the
// original casing is kept so the caller can detect CamelCase.
WordTemplate parse_word(const std::string& word, const std::string& full_template) {
    WordTemplate out;
    std::string body = word;
    if (!body.empty() && body.back() == '*') {
        out.prefix = true;
        body.pop_back();
    }
    if (body.empty()) {
        throw MalformedTemplate("empty word in '" + full_template + "'");
    }
    for (const char c : body) {
        if (c == '*') {
            throw MalformedTemplate("'*' must be final in '" + full_template + "'");
        }
        if (!is_ascii_letter(c)) {
            throw MalformedTemplate("non-letter character in '" + full_template + "'");
        }
    }
    out.stem = body;
    return out;
}

std::string to_lower(std::string s) {
    for (char& c : s) {
        c = lower(c);
    }
    return s;
}

// Split positions of a fused CamelCase word: a new sub-word starts at each
// uppercase letter that follows a lowercase letter ("CleanUp" -> clean, up).
std::vector<std::string> camel_split(const std::string& word) {
    std::vector<std::string> parts;
    std::string current;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i > 0 && std::isupper(static_cast<unsigned char>(word[i])) &&
            std::islower(static_cast<unsigned char>(word[i - 1]))) {
            parts.push_back(current);
            current.clear();
        }
        current.push_back(word[i]);
    }
    parts.push_back(current);
    return parts;
}

} // namespace

std::string_view pattern_scope_name(PatternScope scope) {
    for (const auto& [value, name] : kScopeNames) {
        if (value == scope) {
            return name;
        }
    }
    return "";
}

std::optional<PatternScope> parse_pattern_scope(std::string_view name) {
    for (const auto& [value, scope_name] : kScopeNames) {
        if (scope_name == name) {
            return value;
        }
    }
    return std::nullopt;
}

SarPattern compile_pattern(const std::string& template_text, PatternScope scope) {
    std::istringstream words_in(template_text);
    std::vector<std::string> raw_words;
    std::string word;
    while (words_in >> word) {
        raw_words.push_back(word);
    }
    if (raw_words.empty()) {
        throw MalformedTemplate("empty template");
    }

    SarPattern pattern;
    pattern.text = template_text;
    pattern.scope = scope;

    std::vector<WordTemplate> plain;
    std::vector<WordTemplate> split;
    bool any_camel = false;
    for (const auto& raw : raw_words) {
        const WordTemplate validated = parse_word(raw, template_text);

        WordTemplate lowered;
        lowered.stem = to_lower(validated.stem);
        lowered.prefix = validated.prefix;
        plain.push_back(lowered);

        const auto parts = camel_split(validated.stem);
        if (parts.size() > 1) {
            any_camel = true;
        }
        for (std::size_t i = 0; i < parts.size(); ++i) {
            WordTemplate sub;
            sub.stem = to_lower(parts[i]);
            sub.prefix = validated.prefix && i + 1 == parts.size();
            split.push_back(sub);
        }
    }
    pattern.alternatives.push_back(std::move(plain));
    if (any_camel) {
        pattern.alternatives.push_back(std::move(split));
    }
    return pattern;
}

PatternCatalog load_pattern_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    PatternCatalog catalog;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const auto marker = line.find("version:");
            if (catalog.version.empty() && marker != std::string::npos) {
                std::string v = line.substr(marker + 8);
                v.erase(0, v.find_first_not_of(" \t"));
                catalog.version = v;
            }
            continue;
        }

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) {
                break;
            }
            start = tab + 1;
        }
        if (fields.size() < 2 || fields.size() > 3) {
            throw IoError(path + ":" + std::to_string(line_no) + ": expected 2 or 3 fields");
        }
        const auto scope = parse_pattern_scope(fields[0]);
        if (!scope) {
            throw IoError(path + ":" + std::to_string(line_no) + ": unknown scope '" +
                          fields[0] + "'");
        }
        SarPattern pattern = compile_pattern(fields[1], *scope);
        if (fields.size() == 3) {
            if (fields[2] != "significant") {
                throw IoError(path + ":" + std::to_string(line_no) + ": unexpected field '" +
                              fields[2] + "'");
            }
            pattern.significant = true;
        }
        catalog.patterns.push_back(std::move(pattern));
    }
    return catalog;
}

std::vector<std::string> message_words(std::string_view message) {
    std::vector<std::string> words;
    std::string current;
    for (const char c : message) {
        if (is_ascii_letter(c)) {
            current.push_back(lower(c));
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        words.push_back(std::move(current));
    }
    return words;
}

namespace {

bool word_matches(const WordTemplate& tmpl, const std::string& word) {
    if (tmpl.prefix) {
        return word.size() >= tmpl.stem.size() &&
               word.compare(0, tmpl.stem.size(), tmpl.stem) == 0;
    }
    return word == tmpl.stem;
}

} // namespace

bool pattern_matches(const SarPattern& pattern, const std::vector<std::string>& words) {
    for (const auto& sequence : pattern.alternatives) {
        if (sequence.empty() || sequence.size() > words.size()) {
            continue;
        }
        for (std::size_t start = 0; start + sequence.size() <= words.size(); ++start) {
            bool all = true;
            for (std::size_t i = 0; i < sequence.size(); ++i) {
                if (!word_matches(sequence[i], words[start + i])) {
                    all = false;
                    break;
                }
            }
            if (all) {
                return true;
            }
        }
    }
    return false;
}

std::vector<std::size_t> scan_message(std::string_view message, const PatternCatalog& catalog) {
    const auto words = message_words(message);
    std::vector<std::size_t> matched;
    for (std::size_t i = 0; i < catalog.patterns.size(); ++i) {
        if (pattern_matches(catalog.patterns[i], words)) {
            matched.push_back(i);
        }
    }
    return matched;
}

std::vector<std::string> project_universe(const std::vector<CommitRecord>& a,
                                          const std::vector<CommitRecord>& b) {
    std::set<std::string> ids;
    for (const auto& commit : a) {
        ids.insert(commit.project_id);
    }
    for (const auto& commit : b) {
        ids.insert(commit.project_id);
    }
    return {ids.begin(), ids.end()};
}

std::vector<OccurrencePair> occurrence_vectors(
    const PatternCatalog& catalog,
    const std::vector<CommitRecord>& refactoring_corpus,
    const std::vector<CommitRecord>& nonrefactoring_corpus) {
    const auto projects = project_universe(refactoring_corpus, nonrefactoring_corpus);
    std::map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < projects.size(); ++i) {
        slot[projects[i]] = i;
    }

    std::vector<OccurrencePair> pairs(catalog.patterns.size());
    for (auto& pair : pairs) {
        pair.refactoring.assign(projects.size(), 0.0);
        pair.nonrefactoring.assign(projects.size(), 0.0);
    }

    const auto tally = [&](const std::vector<CommitRecord>& corpus,
                           std::vector<double> OccurrencePair::*side) {
        for (const auto& commit : corpus) {
            const auto words = message_words(commit.message);
            const std::size_t project = slot.at(commit.project_id);
            for (std::size_t i = 0; i < catalog.patterns.size(); ++i) {
                if (pattern_matches(catalog.patterns[i], words)) {
                    (pairs[i].*side)[project] += 1.0;
                }
            }
        }
    };
    tally(refactoring_corpus, &OccurrencePair::refactoring);
    tally(nonrefactoring_corpus, &OccurrencePair::nonrefactoring);
    return pairs;
}

PatternCatalog significance_filter(const PatternCatalog& catalog,
                                   const std::vector<OccurrencePair>& pairs,
                                   double alpha) {
    if (pairs.size() != catalog.patterns.size()) {
        throw Error("occurrence pairs not aligned with catalog (" +
                    std::to_string(pairs.size()) + " vs " +
                    std::to_string(catalog.patterns.size()) + ")");
    }
    PatternCatalog out = catalog;
    for (std::size_t i = 0; i < out.patterns.size(); ++i) {
        const auto result =
            mann_whitney_u(pairs[i].refactoring, pairs[i].nonrefactoring, Alternative::greater);
        out.patterns[i].significant = result.p_value < alpha;
    }
    return out;
}

std::map<std::string, LabelSplit> label_split(const std::vector<RefactoringCommit>& refcommits,
                                              const std::vector<SarPattern>& patternset) {
    std::map<std::string, LabelSplit> out;
    for (const auto& refcommit : refcommits) {
        const auto words = message_words(refcommit.commit.message);
        bool labeled = false;
        for (const auto& pattern : patternset) {
            if (pattern_matches(pattern, words)) {
                labeled = true;
                break;
            }
        }
        for (const auto& op : refcommit.operations) {
            auto& split = out[op.kind];
            if (labeled) {
                ++split.labeled;
            } else {
                ++split.unlabeled;
            }
        }
    }
    return out;
}

} // namespace refdoc
