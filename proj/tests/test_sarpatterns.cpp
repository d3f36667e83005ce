#include "refdoc/sarpatterns.hpp"

#include "refdoc/errors.hpp"
#include "refdoc/stats.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <string>

using namespace refdoc;

namespace {

const PatternCatalog& shipped_catalog() {
    static const PatternCatalog catalog =
        load_pattern_catalog(std::string(REFDOC_DATA_DIR) + "/sar_catalog.tsv");
    return catalog;
}

PatternCatalog catalog_of(std::initializer_list<const char*> templates) {
    PatternCatalog catalog;
    for (const char* text : templates) {
        catalog.patterns.push_back(compile_pattern(text));
    }
    return catalog;
}

bool matches(const std::string& message, const char* template_text) {
    const auto pattern = compile_pattern(template_text);
    return pattern_matches(pattern, message_words(message));
}

CommitRecord commit(std::string project, std::string message) {
    CommitRecord c;
    c.project_id = std::move(project);
    c.message = std::move(message);
    return c;
}

// Independent matcher: one regular expression per alternative, run over the
// raw lowercased message. Word boundaries are "not a letter" so the oracle
// never tokenizes.
std::vector<std::regex> oracle_regexes(const SarPattern& pattern) {
    std::vector<std::regex> out;
    for (const auto& sequence : pattern.alternatives) {
        std::string body;
        for (std::size_t i = 0; i < sequence.size(); ++i) {
            if (i > 0) {
                body += "[^a-z]+";
            }
            body += sequence[i].stem;
            if (sequence[i].prefix) {
                body += "[a-z]*";
            }
        }
        out.emplace_back("(^|[^a-z])(" + body + ")([^a-z]|$)");
    }
    return out;
}

std::string lowercased(std::string s) {
    for (char& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

} // namespace

TEST_CASE("pattern compilation", "[sarpatterns]") {
    const auto pull_up = compile_pattern("Pull* Up");
    REQUIRE(pull_up.alternatives.size() == 1);
    REQUIRE(pull_up.alternatives[0].size() == 2);
    CHECK(pull_up.alternatives[0][0].stem == "pull");
    CHECK(pull_up.alternatives[0][0].prefix);
    CHECK(pull_up.alternatives[0][1].stem == "up");
    CHECK_FALSE(pull_up.alternatives[0][1].prefix);

    const auto refactor = compile_pattern("refactor*");
    REQUIRE(refactor.alternatives.size() == 1);
    REQUIRE(refactor.alternatives[0].size() == 1);
    CHECK(refactor.alternatives[0][0].stem == "refactor");
    CHECK(refactor.alternatives[0][0].prefix);

    CHECK_THROWS_AS(compile_pattern("a**b"), MalformedTemplate);
    CHECK_THROWS_AS(compile_pattern("a*b"), MalformedTemplate);
    CHECK_THROWS_AS(compile_pattern(""), MalformedTemplate);
    CHECK_THROWS_AS(compile_pattern("   "), MalformedTemplate);
    CHECK_THROWS_AS(compile_pattern("*"), MalformedTemplate);
    CHECK_THROWS_AS(compile_pattern("fix-up"), MalformedTemplate);
}

TEST_CASE("fused CamelCase templates also match their split form", "[sarpatterns]") {
    const auto clean_up = compile_pattern("CleanUp");
    REQUIRE(clean_up.alternatives.size() == 2);
    REQUIRE(clean_up.alternatives[0].size() == 1);
    CHECK(clean_up.alternatives[0][0].stem == "cleanup");
    REQUIRE(clean_up.alternatives[1].size() == 2);
    CHECK(clean_up.alternatives[1][0].stem == "clean");
    CHECK(clean_up.alternatives[1][1].stem == "up");

    CHECK(pattern_matches(clean_up, message_words("final cleanup pass")));
    CHECK(pattern_matches(clean_up, message_words("clean up the parser")));
    CHECK_FALSE(pattern_matches(clean_up, message_words("cleaning up the parser")));

    // A trailing '*' on a fused word belongs to the last sub-word.
    const auto fused_star = compile_pattern("FooBar*");
    REQUIRE(fused_star.alternatives.size() == 2);
    CHECK(fused_star.alternatives[1][1].prefix);
    CHECK(pattern_matches(fused_star, message_words("foo barring along")));

    // Leading uppercase alone is not CamelCase.
    CHECK(compile_pattern("Clean up").alternatives.size() == 1);
}

TEST_CASE("message scanning follows the published examples", "[sarpatterns]") {
    CHECK(matches("Cleaning up the parser", "Clean* up"));
    CHECK_FALSE(matches("prefactor the module", "refactor*"));
    CHECK(matches("Refactored the parser", "refactor*"));
    CHECK(matches("REFACTOR!", "refactor*"));

    // Punctuation separates words.
    CHECK(matches("clean-up, finally", "Clean* up"));

    // Alignment must be consecutive.
    CHECK_FALSE(matches("clean the up", "Clean* up"));

    // The wildcard matches zero extra letters too.
    CHECK(matches("rename the field", "Renam*"));
}

TEST_CASE("scan reports each pattern once, in catalog order", "[sarpatterns]") {
    const auto catalog = catalog_of({"refactor*", "Clean* up", "xyzzy"});
    const auto hits = scan_message("Refactoring: cleaning up after refactor cleanup", catalog);
    CHECK(hits == std::vector<std::size_t>{0, 1});
    CHECK(scan_message("nothing to see", catalog).empty());
}

TEST_CASE("scanner agrees with a regex oracle on random messages", "[sarpatterns]") {
    const auto& catalog = shipped_catalog();
    REQUIRE(catalog.patterns.size() >= 50);

    // Deterministic 50-pattern sample.
    std::mt19937_64 rng(123);
    std::vector<std::size_t> order(catalog.patterns.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(50);

    PatternCatalog sample;
    std::vector<std::vector<std::regex>> oracles;
    for (const std::size_t idx : order) {
        sample.patterns.push_back(catalog.patterns[idx]);
        oracles.push_back(oracle_regexes(catalog.patterns[idx]));
    }

    // Word pool: pattern stems, stems with suffixes, near-misses, fillers.
    std::vector<std::string> pool = {"the", "a", "parser", "alpha", "code", "module", "xq"};
    for (const auto& pattern : sample.patterns) {
        for (const auto& sequence : pattern.alternatives) {
            for (const auto& word : sequence) {
                pool.push_back(word.stem);
                pool.push_back(word.stem + "ing");
                pool.push_back(word.stem + "ed");
                pool.push_back(word.stem + "s");
                pool.push_back("x" + word.stem); // never matches a prefix rule
                if (word.stem.size() > 2) {
                    pool.push_back(word.stem.substr(0, word.stem.size() - 1));
                }
            }
        }
    }

    const std::vector<std::string> separators = {" ", " ", " ", ", ", "-", "! ", ". ", ": "};
    std::uniform_int_distribution<std::size_t> pool_dist(0, pool.size() - 1);
    std::uniform_int_distribution<std::size_t> sep_dist(0, separators.size() - 1);
    std::uniform_int_distribution<std::size_t> len_dist(3, 12);
    std::uniform_int_distribution<int> insert_phrase(0, 4);
    std::uniform_int_distribution<std::size_t> sample_dist(0, sample.patterns.size() - 1);
    std::uniform_int_distribution<int> suffix_dist(0, 3);
    const std::vector<std::string> suffixes = {"", "ing", "ed", "s"};

    std::size_t disagreements = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::string message;
        const std::size_t n_words = len_dist(rng);
        for (std::size_t w = 0; w < n_words; ++w) {
            if (!message.empty()) {
                message += separators[sep_dist(rng)];
            }
            message += pool[pool_dist(rng)];
        }
        if (insert_phrase(rng) == 0) {
            // Realize one sampled pattern inside the message.
            const auto& pattern = sample.patterns[sample_dist(rng)];
            const auto& sequence = pattern.alternatives.front();
            message += separators[sep_dist(rng)];
            for (std::size_t i = 0; i < sequence.size(); ++i) {
                if (i > 0) {
                    message += " ";
                }
                message += sequence[i].stem;
                if (sequence[i].prefix) {
                    message += suffixes[static_cast<std::size_t>(suffix_dist(rng))];
                }
            }
        }

        const auto expected = [&]() {
            std::set<std::size_t> hits;
            const std::string lowered = lowercased(message);
            for (std::size_t p = 0; p < oracles.size(); ++p) {
                for (const auto& re : oracles[p]) {
                    if (std::regex_search(lowered, re)) {
                        hits.insert(p);
                        break;
                    }
                }
            }
            return hits;
        }();

        const auto got_vec = scan_message(message, sample);
        const std::set<std::size_t> got(got_vec.begin(), got_vec.end());
        if (got != expected) {
            ++disagreements;
            if (disagreements <= 3) {
                UNSCOPED_INFO("message: " << message);
            }
        }
    }
    CHECK(disagreements == 0);
}

TEST_CASE("occurrence vectors tally per project", "[sarpatterns]") {
    const auto catalog = catalog_of({"refactor*", "CleanUp", "xyzzy"});
    const std::vector<CommitRecord> ref_corpus = {
        commit("alpha", "refactor the parser"),
        commit("alpha", "final cleanup"),
        commit("alpha", "refactoring again"),
        commit("beta", "fix overflow"),
    };
    const std::vector<CommitRecord> nonref_corpus = {
        commit("alpha", "misc updates"),
        commit("beta", "refactor mention without detected operations"),
        commit("gamma", "clean up imports"),
    };

    CHECK(project_universe(ref_corpus, nonref_corpus) ==
          std::vector<std::string>{"alpha", "beta", "gamma"});

    const auto pairs = occurrence_vectors(catalog, ref_corpus, nonref_corpus);
    REQUIRE(pairs.size() == 3);

    CHECK(pairs[0].refactoring == std::vector<double>{2, 0, 0});
    CHECK(pairs[0].nonrefactoring == std::vector<double>{0, 1, 0});
    CHECK(pairs[1].refactoring == std::vector<double>{1, 0, 0});
    CHECK(pairs[1].nonrefactoring == std::vector<double>{0, 0, 1});
    CHECK(pairs[2].refactoring == std::vector<double>{0, 0, 0});
    CHECK(pairs[2].nonrefactoring == std::vector<double>{0, 0, 0});
}

TEST_CASE("significance filter flags every pattern explicitly", "[sarpatterns]") {
    const auto catalog = catalog_of({"refactor*", "xyzzy"});
    std::vector<OccurrencePair> pairs(2);
    // Every refactoring-project count beats every non-refactoring count:
    // the exact one-sided p-value is 1/C(16,8).
    pairs[0].refactoring = {9, 10, 11, 12, 13, 14, 15, 16};
    pairs[0].nonrefactoring = {1, 2, 3, 4, 5, 6, 7, 8};
    pairs[1].refactoring.assign(8, 0.0);
    pairs[1].nonrefactoring.assign(8, 0.0);

    const auto filtered = significance_filter(catalog, pairs, 0.05);
    REQUIRE(filtered.patterns.size() == 2);
    REQUIRE(filtered.patterns[0].significant.has_value());
    CHECK(*filtered.patterns[0].significant);
    REQUIRE(filtered.patterns[1].significant.has_value());
    CHECK_FALSE(*filtered.patterns[1].significant);

    // Cross-check the boundary case against the exact test itself.
    const auto exact =
        mann_whitney_u(pairs[0].refactoring, pairs[0].nonrefactoring, Alternative::greater);
    CHECK(exact.p_value == Catch::Approx(1.0 / 12870.0).margin(1e-15));

    CHECK_THROWS_AS(significance_filter(catalog, {}, 0.05), Error);
}

TEST_CASE("shipped catalog loads with its published shape", "[sarpatterns]") {
    const auto& catalog = shipped_catalog();
    CHECK(catalog.patterns.size() == 513);
    CHECK(catalog.version == "1");

    std::size_t significant = 0;
    std::set<std::pair<PatternScope, std::string>> identities;
    for (const auto& pattern : catalog.patterns) {
        REQUIRE_FALSE(pattern.alternatives.empty());
        REQUIRE_FALSE(pattern.alternatives.front().empty());
        if (pattern.significant.value_or(false)) {
            ++significant;
        }
        CHECK(identities.insert({pattern.scope, pattern.text}).second);
    }
    CHECK(significant == 125);

    // The keyword family that anchors the whole catalog is present and fires.
    const auto hits = scan_message("Refactored duplicated code", catalog);
    CHECK_FALSE(hits.empty());
}

TEST_CASE("label split tallies operations by kind", "[sarpatterns]") {
    const auto make_refcommit = [](std::string message, std::vector<std::string> kinds) {
        RefactoringCommit rc;
        rc.commit.message = std::move(message);
        for (auto& kind : kinds) {
            RefactoringOperation op;
            op.kind = std::move(kind);
            rc.operations.push_back(std::move(op));
        }
        return rc;
    };

    const std::vector<RefactoringCommit> refcommits = {
        make_refcommit("refactor the parser", {"Extract Method", "Move Class"}),
        make_refcommit("tidy things", {"Extract Method"}),
        make_refcommit("refactoring for clarity", {"Move Class"}),
        make_refcommit("clean up imports", {"Extract Method"}),
        make_refcommit("misc", {"Move Class", "Move Class"}),
    };

    const std::vector<SarPattern> keyword = {compile_pattern("refactor*")};
    const auto by_keyword = label_split(refcommits, keyword);
    CHECK(by_keyword.at("Extract Method").labeled == 1);
    CHECK(by_keyword.at("Extract Method").unlabeled == 2);
    CHECK(by_keyword.at("Move Class").labeled == 2);
    CHECK(by_keyword.at("Move Class").unlabeled == 2);

    // Conservation per kind.
    std::size_t total_ops = 0;
    for (const auto& [kind, split] : by_keyword) {
        total_ops += split.labeled + split.unlabeled;
    }
    CHECK(total_ops == 7);

    // Empty pattern set labels nothing.
    for (const auto& [kind, split] : label_split(refcommits, {})) {
        CHECK(split.labeled == 0);
    }

    // Keyword-labeled is a subset of SAR-labeled whenever the keyword is in
    // the SAR set.
    const std::vector<SarPattern> sar = {compile_pattern("refactor*"),
                                         compile_pattern("Clean* up"),
                                         compile_pattern("tidy*")};
    const auto by_sar = label_split(refcommits, sar);
    for (const auto& [kind, split] : by_keyword) {
        CHECK(split.labeled <= by_sar.at(kind).labeled);
    }
}
