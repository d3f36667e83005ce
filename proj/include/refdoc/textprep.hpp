#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace refdoc {

// Stop words come in two layers: a fixed general-English list and the
// commit-message specific additions (git, code, refactor, ...).
struct StopWordSet {
    std::unordered_set<std::string> default_words;
    std::unordered_set<std::string> custom_words;

    bool contains(std::string_view word) const {
        const std::string key(word);
        return default_words.count(key) > 0 || custom_words.count(key) > 0;
    }
};

// Result of running the full normalization pipeline over one commit message.
// `sentences` holds the finished lemma tokens per sentence (empty sentences
// are dropped); `lemmas` is their concatenation in order.
struct NormalizedMessage {
    std::string original;
    std::vector<std::vector<std::string>> sentences;
    std::vector<std::string> lemmas;
};

// Lowercase contraction -> expansion ("i'm" -> "i am").
using ContractionTable = std::unordered_map<std::string, std::string>;

struct LemmaTables {
    // Irregular surface form -> lemma ("went" -> "go"). Consulted first.
    std::unordered_map<std::string, std::string> irregular;
    // Base forms. A suffix-rule candidate is accepted only if found here;
    // words already present are returned unchanged.
    std::unordered_set<std::string> lexicon;
};

// Loaders for the plain-text tables shipped under data/. Lines starting with
// '#' and blank lines are ignored; two-column files are tab separated.
StopWordSet load_stopwords(const std::string& default_path, const std::string& custom_path);
ContractionTable load_contractions(const std::string& path);
LemmaTables load_lemma_tables(const std::string& exceptions_path, const std::string& lexicon_path);

// Pipeline stages. Each is a pure function; `normalize` composes them
// sentence by sentence.
//
// URL removal must happen before sentence splitting — a dot inside
// "https://svn.example.org" is not a sentence boundary — so it is exposed
// separately. strip_noise also applies it, keeping the stage usable on its
// own.
std::string remove_url_tokens(std::string_view text);
std::string expand_contractions(std::string_view text, const ContractionTable& table);
std::string strip_noise(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);
std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const StopWordSet& stops);
std::vector<std::string> lemmatize(const std::vector<std::string>& tokens, const LemmaTables& tables);

NormalizedMessage normalize(std::string_view message,
                            const StopWordSet& stops,
                            const ContractionTable& contractions,
                            const LemmaTables& lemma_tables);

// Convenience wrapper that owns all four tables.
class Normalizer {
public:
    Normalizer(StopWordSet stops, ContractionTable contractions, LemmaTables lemma_tables);

    // Loads the tables shipped in `data_dir` (stopwords_default.txt,
    // stopwords_custom.txt, contractions.tsv, lemma_exceptions.tsv,
    // lemma_lexicon.txt).
    static Normalizer from_data_dir(const std::string& data_dir);

    NormalizedMessage operator()(std::string_view message) const;

    const StopWordSet& stops() const { return stops_; }
    const ContractionTable& contractions() const { return contractions_; }
    const LemmaTables& lemma_tables() const { return lemma_tables_; }

private:
    StopWordSet stops_;
    ContractionTable contractions_;
    LemmaTables lemma_tables_;
};

} // namespace refdoc
