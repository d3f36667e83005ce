#include "refdoc/textprep.hpp"

#include "refdoc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace refdoc {

namespace {

std::vector<std::string> read_table_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open table file: " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        lines.push_back(line);
    }
    return lines;
}

std::pair<std::string, std::string> split_tab(const std::string& line, const std::string& path) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
        throw IoError("expected two tab-separated columns in " + path + ": " + line);
    }
    return {line.substr(0, tab), line.substr(tab + 1)};
}

bool ascii_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool all_lower_alpha(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](char c) { return c >= 'a' && c <= 'z'; });
}

} // namespace

StopWordSet load_stopwords(const std::string& default_path, const std::string& custom_path) {
    StopWordSet stops;
    for (auto& w : read_table_lines(default_path)) {
        stops.default_words.insert(to_lower(w));
    }
    for (auto& w : read_table_lines(custom_path)) {
        stops.custom_words.insert(to_lower(w));
    }
    return stops;
}

ContractionTable load_contractions(const std::string& path) {
    ContractionTable table;
    for (auto& line : read_table_lines(path)) {
        auto [key, expansion] = split_tab(line, path);
        table[to_lower(key)] = expansion;
    }
    return table;
}

LemmaTables load_lemma_tables(const std::string& exceptions_path, const std::string& lexicon_path) {
    LemmaTables tables;
    for (auto& line : read_table_lines(exceptions_path)) {
        auto [surface, lemma] = split_tab(line, exceptions_path);
        tables.irregular[to_lower(surface)] = to_lower(lemma);
    }
    for (auto& w : read_table_lines(lexicon_path)) {
        tables.lexicon.insert(to_lower(w));
    }
    return tables;
}

std::string expand_contractions(std::string_view text, const ContractionTable& table) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        if (!ascii_alpha(text[i]) && text[i] != '\'') {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        size_t j = i;
        while (j < text.size() && (ascii_alpha(text[j]) || text[j] == '\'')) {
            ++j;
        }
        const std::string_view run = text.substr(i, j - i);
        const auto it = table.find(to_lower(run));
        if (it == table.end()) {
            out.append(run);
        } else {
            std::string expansion = it->second;
            if (!expansion.empty() && std::isupper(static_cast<unsigned char>(run.front()))) {
                expansion.front() =
                    static_cast<char>(std::toupper(static_cast<unsigned char>(expansion.front())));
            }
            out.append(expansion);
        }
        i = j;
    }
    return out;
}

std::string remove_url_tokens(std::string_view text) {
    // Works on whitespace tokens so the scheme and everything glued to it
    // ("https://x.y!") disappear together. Newlines are preserved because
    // they double as sentence boundaries downstream.
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) {
            ++j;
        }
        const std::string low = to_lower(text.substr(i, j - i));
        if (low.find("://") == std::string::npos && low.rfind("www.", 0) != 0) {
            out.append(text.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

std::string strip_noise(std::string_view text) {
    const std::string no_urls = remove_url_tokens(text);

    // Everything that is not an ASCII letter becomes a separator.
    std::string spaced;
    spaced.reserve(no_urls.size());
    for (char c : no_urls) {
        if (c >= 'a' && c <= 'z') {
            spaced.push_back(c);
        } else if (c >= 'A' && c <= 'Z') {
            spaced.push_back(static_cast<char>(c - 'A' + 'a'));
        } else {
            spaced.push_back(' ');
        }
    }

    std::string out;
    std::string word;
    std::istringstream pieces(spaced);
    while (pieces >> word) {
        if (word.size() < 2) {
            continue;
        }
        if (!out.empty()) {
            out.push_back(' ');
        }
        out.append(word);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) {
        tokens.push_back(token);
    }
    return tokens;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const StopWordSet& stops) {
    std::erase_if(tokens, [&](const std::string& t) { return stops.contains(t); });
    return tokens;
}

namespace {

// Drops a doubled trailing consonant ("runn" -> "run"). 'l' and 's' stay
// doubled because English keeps them ("fall", "miss").
std::string undouble(std::string s) {
    if (s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2] && s.back() != 'l' && s.back() != 's') {
        s.pop_back();
    }
    return s;
}

bool plural_s_applies(const std::string& t) {
    if (t.size() < 3 || t.back() != 's') {
        return false;
    }
    const std::string tail = t.substr(t.size() - 2);
    return tail != "ss" && tail != "us" && tail != "is";
}

std::string lemma_one(const std::string& t, const LemmaTables& tables) {
    if (const auto it = tables.irregular.find(t); it != tables.irregular.end()) {
        return it->second;
    }
    const auto& lex = tables.lexicon;
    if (lex.count(t) > 0) {
        return t;
    }

    const size_t n = t.size();
    const auto ends = [&](std::string_view suf) { return t.ends_with(suf); };

    // Candidate bases in priority order; the first one the lexicon knows
    // wins. Verb "+e" restoration is tried before the bare stem so that
    // "used" resolves to "use" rather than a shorter accident.
    std::vector<std::string> cands;
    const auto push_stripped = [&](size_t cut) {
        const std::string base = t.substr(0, n - cut);
        cands.push_back(base + "e");
        cands.push_back(base);
        cands.push_back(undouble(base));
    };
    if (n >= 5 && ends("ies")) {
        cands.push_back(t.substr(0, n - 3) + "y");
    }
    if (n >= 4 && ends("ied")) {
        cands.push_back(t.substr(0, n - 3) + "y");
    }
    if (n >= 5 && ends("ing")) {
        push_stripped(3);
    }
    if (n >= 4 && ends("ed")) {
        push_stripped(2);
    }
    if (plural_s_applies(t)) {
        cands.push_back(t.substr(0, n - 1));
        if (n >= 4 && ends("es")) {
            cands.push_back(t.substr(0, n - 2));
        }
    }
    if (n >= 5 && ends("ier")) {
        cands.push_back(t.substr(0, n - 3) + "y");
    }
    if (n >= 4 && ends("er")) {
        push_stripped(2);
    }
    if (n >= 6 && ends("iest")) {
        cands.push_back(t.substr(0, n - 4) + "y");
    }
    if (n >= 5 && ends("est")) {
        push_stripped(3);
    }
    for (const auto& c : cands) {
        if (c.size() >= 2 && lex.count(c) > 0) {
            return c;
        }
    }

    // Unknown word: apply the safest transformation and stop. Comparative
    // and superlative endings are left alone here — without a dictionary
    // hit, "never"/"test" style false positives outnumber real ones.
    if (n >= 5 && ends("ies")) {
        return t.substr(0, n - 3) + "y";
    }
    if (n >= 5 && (ends("sses") || ends("ches") || ends("shes") || ends("xes") || ends("zes"))) {
        return t.substr(0, n - 2);
    }
    if (plural_s_applies(t)) {
        return t.substr(0, n - 1);
    }
    if (n >= 5 && ends("ing")) {
        return undouble(t.substr(0, n - 3));
    }
    if (n >= 4 && ends("ed")) {
        return undouble(t.substr(0, n - 2));
    }
    return t;
}

} // namespace

std::vector<std::string> lemmatize(const std::vector<std::string>& tokens, const LemmaTables& tables) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        out.push_back(lemma_one(t, tables));
    }
    return out;
}

NormalizedMessage normalize(std::string_view message,
                            const StopWordSet& stops,
                            const ContractionTable& contractions,
                            const LemmaTables& lemma_tables) {
    NormalizedMessage result;
    result.original.assign(message);

    // Drop URL tokens from the whole message up front: their dots must not
    // act as sentence boundaries.
    const std::string url_free = remove_url_tokens(message);

    std::vector<std::string> sentences;
    std::string current;
    for (char c : url_free) {
        if (c == '.' || c == '!' || c == '?' || c == '\n') {
            sentences.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    sentences.push_back(std::move(current));

    for (const auto& sentence : sentences) {
        auto tokens = remove_stopwords(
            tokenize(strip_noise(expand_contractions(sentence, contractions))), stops);
        auto lemmas = lemmatize(tokens, lemma_tables);
        // Lemmatization can land on a stop word ("refactored" -> "refactor"),
        // so the stop filter runs once more, together with the alphabet and
        // minimum-length guarantees of the output.
        std::erase_if(lemmas, [&](const std::string& l) {
            return l.size() < 2 || !all_lower_alpha(l) || stops.contains(l);
        });
        if (lemmas.empty()) {
            continue;
        }
        result.lemmas.insert(result.lemmas.end(), lemmas.begin(), lemmas.end());
        result.sentences.push_back(std::move(lemmas));
    }
    return result;
}

Normalizer::Normalizer(StopWordSet stops, ContractionTable contractions, LemmaTables lemma_tables)
    : stops_(std::move(stops)),
      contractions_(std::move(contractions)),
      lemma_tables_(std::move(lemma_tables)) {}

Normalizer Normalizer::from_data_dir(const std::string& data_dir) {
    return Normalizer(
        load_stopwords(data_dir + "/stopwords_default.txt", data_dir + "/stopwords_custom.txt"),
        load_contractions(data_dir + "/contractions.tsv"),
        load_lemma_tables(data_dir + "/lemma_exceptions.tsv", data_dir + "/lemma_lexicon.txt"));
}

NormalizedMessage Normalizer::operator()(std::string_view message) const {
    return normalize(message, stops_, contractions_, lemma_tables_);
}

} // namespace refdoc
