#pragma once

#include "refdoc/categories.hpp"
#include "refdoc/textprep.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace refdoc {

struct NgramConfig {
    std::size_t min_n = 1;
    std::size_t max_n = 2;
    // Most frequent n-grams kept when fitting; 0 keeps everything.
    std::size_t max_features = 5000;
};

// Sparse feature vector keyed by vocabulary column. Entries are strictly
// positive and the vector is L2-normalized unless it is empty.
struct SparseVector {
    std::map<std::size_t, double> entries;

    double norm() const;
    double dot(const SparseVector& other) const;
    bool empty() const { return entries.empty(); }
};

struct TfidfModel {
    NgramConfig config;
    std::size_t corpus_size = 0;
    // N-gram -> column index; indices are 0..V-1 in lexicographic n-gram
    // order so fitted models serialize identically run to run.
    std::map<std::string, std::size_t> vocabulary;
    std::vector<double> idf;
};

// All n-grams of a message in reading order, sentence-bounded (an n-gram
// never spans a sentence boundary), words joined by single spaces.
std::vector<std::string> extract_ngrams(const NormalizedMessage& doc, const NgramConfig& config);

// Fits vocabulary and idf over the corpus. Vocabulary keeps the
// config.max_features most frequent n-grams by raw occurrence count across
// the corpus (ties prefer the lexicographically smaller n-gram);
// idf[t] = ln((1 + N) / (1 + df(t))) + 1. Throws EmptyCorpus.
TfidfModel fit_tfidf(const std::vector<NormalizedMessage>& docs, const NgramConfig& config);

// Raw count × idf per in-vocabulary n-gram, then L2 normalization.
SparseVector transform(const TfidfModel& model, const NormalizedMessage& doc);

std::vector<SparseVector> transform_all(const TfidfModel& model,
                                        const std::vector<NormalizedMessage>& docs);

// JSON persistence: {"config": {...}, "corpus_size": N,
// "entries": [[ngram, index, idf], ...]} with entries in index order.
void save_tfidf(const TfidfModel& model, const std::string& path);
TfidfModel load_tfidf(const std::string& path);
std::string tfidf_to_json(const TfidfModel& model);
TfidfModel tfidf_from_json(const std::string& text);

class TrainedModel; // classify.hpp

// The k highest-scoring n-grams for one category. Naive Bayes contributes
// per-category log-likelihoods, logistic regression its per-category
// coefficients, and tree models their accumulated Gini importance (the same
// ranking for every category). Ties resolve lexicographically; k larger
// than the vocabulary returns everything. Throws UnsupportedModel for
// nearest-neighbor models, which learn no feature scores.
std::vector<std::string> top_features(const TfidfModel& model,
                                      const TrainedModel& trained,
                                      Category category,
                                      std::size_t k);

} // namespace refdoc
