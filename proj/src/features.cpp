#include "refdoc/features.hpp"

#include "refdoc/classify.hpp"

#include "refdoc/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <unordered_map>

namespace refdoc {

double SparseVector::norm() const {
    double sum = 0.0;
    for (const auto& [idx, w] : entries) {
        sum += w * w;
    }
    return std::sqrt(sum);
}

double SparseVector::dot(const SparseVector& other) const {
    // Walk the smaller map, probe the larger one.
    const SparseVector* a = this;
    const SparseVector* b = &other;
    if (a->entries.size() > b->entries.size()) {
        std::swap(a, b);
    }
    double sum = 0.0;
    for (const auto& [idx, w] : a->entries) {
        const auto it = b->entries.find(idx);
        if (it != b->entries.end()) {
            sum += w * it->second;
        }
    }
    return sum;
}

std::vector<std::string> extract_ngrams(const NormalizedMessage& doc, const NgramConfig& config) {
    std::vector<std::string> out;
    for (const auto& sentence : doc.sentences) {
        for (std::size_t n = config.min_n; n <= config.max_n; ++n) {
            if (sentence.size() < n) {
                continue;
            }
            for (std::size_t i = 0; i + n <= sentence.size(); ++i) {
                std::string gram = sentence[i];
                for (std::size_t j = 1; j < n; ++j) {
                    gram.push_back(' ');
                    gram.append(sentence[i + j]);
                }
                out.push_back(std::move(gram));
            }
        }
    }
    return out;
}

TfidfModel fit_tfidf(const std::vector<NormalizedMessage>& docs, const NgramConfig& config) {
    if (docs.empty()) {
        throw EmptyCorpus();
    }

    std::unordered_map<std::string, std::size_t> total_count;
    std::unordered_map<std::string, std::size_t> doc_freq;
    for (const auto& doc : docs) {
        std::set<std::string> seen;
        for (auto& gram : extract_ngrams(doc, config)) {
            ++total_count[gram];
            seen.insert(std::move(gram));
        }
        for (const auto& gram : seen) {
            ++doc_freq[gram];
        }
    }

    std::vector<std::string> terms;
    terms.reserve(total_count.size());
    for (const auto& [gram, count] : total_count) {
        terms.push_back(gram);
    }
    if (config.max_features > 0 && terms.size() > config.max_features) {
        // Most frequent first; equal counts keep the lexicographically
        // smaller n-gram.
        std::sort(terms.begin(), terms.end(), [&](const std::string& a, const std::string& b) {
            const std::size_t ca = total_count.at(a);
            const std::size_t cb = total_count.at(b);
            if (ca != cb) {
                return ca > cb;
            }
            return a < b;
        });
        terms.resize(config.max_features);
    }
    std::sort(terms.begin(), terms.end());

    TfidfModel model;
    model.config = config;
    model.corpus_size = docs.size();
    model.idf.reserve(terms.size());
    const double n_docs = static_cast<double>(docs.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double df = static_cast<double>(doc_freq.at(terms[i]));
        model.vocabulary.emplace(std::move(terms[i]), i);
        model.idf.push_back(std::log((1.0 + n_docs) / (1.0 + df)) + 1.0);
    }
    return model;
}

SparseVector transform(const TfidfModel& model, const NormalizedMessage& doc) {
    SparseVector vec;
    for (const auto& gram : extract_ngrams(doc, model.config)) {
        const auto it = model.vocabulary.find(gram);
        if (it != model.vocabulary.end()) {
            vec.entries[it->second] += model.idf[it->second];
        }
    }
    const double norm = vec.norm();
    if (norm > 0.0) {
        for (auto& [idx, w] : vec.entries) {
            w /= norm;
        }
    }
    return vec;
}

std::vector<SparseVector> transform_all(const TfidfModel& model,
                                        const std::vector<NormalizedMessage>& docs) {
    std::vector<SparseVector> out;
    out.reserve(docs.size());
    for (const auto& doc : docs) {
        out.push_back(transform(model, doc));
    }
    return out;
}

std::string tfidf_to_json(const TfidfModel& model) {
    nlohmann::json j;
    j["config"] = {
        {"min_n", model.config.min_n},
        {"max_n", model.config.max_n},
        {"max_features", model.config.max_features},
    };
    j["corpus_size"] = model.corpus_size;
    auto entries = nlohmann::json::array();
    std::vector<const std::string*> by_index(model.vocabulary.size());
    for (const auto& [gram, idx] : model.vocabulary) {
        by_index[idx] = &gram;
    }
    for (std::size_t i = 0; i < by_index.size(); ++i) {
        entries.push_back({*by_index[i], i, model.idf[i]});
    }
    j["entries"] = std::move(entries);
    return j.dump(2) + "\n";
}

TfidfModel tfidf_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedJson(e.what());
    }
    TfidfModel model;
    try {
        model.config.min_n = j.at("config").at("min_n").get<std::size_t>();
        model.config.max_n = j.at("config").at("max_n").get<std::size_t>();
        model.config.max_features = j.at("config").at("max_features").get<std::size_t>();
        model.corpus_size = j.at("corpus_size").get<std::size_t>();
        const auto& entries = j.at("entries");
        model.idf.resize(entries.size());
        for (const auto& e : entries) {
            const auto gram = e.at(0).get<std::string>();
            const auto idx = e.at(1).get<std::size_t>();
            if (idx >= model.idf.size()) {
                throw MalformedJson("entry index out of range: " + gram);
            }
            model.vocabulary[gram] = idx;
            model.idf[idx] = e.at(2).get<double>();
        }
        if (model.vocabulary.size() != model.idf.size()) {
            throw MalformedJson("duplicate or missing vocabulary indices");
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedJson(e.what());
    }
    return model;
}

void save_tfidf(const TfidfModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << tfidf_to_json(model);
    if (!out) {
        throw IoError("short write to " + path);
    }
}

TfidfModel load_tfidf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return tfidf_from_json(text);
}

std::vector<std::string> top_features(const TfidfModel& model,
                                      const TrainedModel& trained,
                                      Category category,
                                      std::size_t k) {
    const std::vector<double> scores = trained.feature_scores(category);
    // (score desc, n-gram asc); vocabulary terms the model never saw rank
    // below every scored term.
    std::vector<std::pair<double, const std::string*>> ranked;
    ranked.reserve(model.vocabulary.size());
    for (const auto& [ngram, index] : model.vocabulary) {
        const double score = index < scores.size()
                                 ? scores[index]
                                 : -std::numeric_limits<double>::infinity();
        ranked.push_back({score, &ngram});
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return *a.second < *b.second;
    });
    const std::size_t take = std::min(k, ranked.size());
    std::vector<std::string> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.push_back(*ranked[i].second);
    }
    return out;
}

} // namespace refdoc
