#pragma once

#include "refdoc/categories.hpp"
#include "refdoc/corpus.hpp"
#include "refdoc/features.hpp"
#include "refdoc/stats.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace refdoc {

// A commit with its assigned category and (optionally) its feature vector.
struct LabeledCommit {
    CommitRecord commit;
    Category label = Category::Functional;
    SparseVector vector;
};

enum class ModelKind {
    RandomForest,
    DecisionTree,
    LogisticRegression,
    MultinomialNB,
    KNearest,
};

constexpr std::string_view model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::RandomForest: return "rf";
        case ModelKind::DecisionTree: return "dt";
        case ModelKind::LogisticRegression: return "lr";
        case ModelKind::MultinomialNB: return "mnb";
        case ModelKind::KNearest: return "knn";
    }
    return "";
}

std::optional<ModelKind> parse_model_kind(std::string_view name);

enum class FeatureSampling { Sqrt, All };

struct RfParams {
    std::size_t max_depth = 78;
    std::size_t n_estimators = 500;
    std::string criterion = "gini";
    bool bootstrap = false; // false: every tree sees the full training set
    FeatureSampling feature_sampling = FeatureSampling::Sqrt;
};

struct DtParams {
    std::string criterion = "gini";
    std::size_t max_depth = 75;
};

struct LrParams {
    std::string penalty = "l1";
    double c = 1.0; // inverse regularization strength
};

struct MnbParams {
    double alpha = 2.63;
};

struct KnnParams {
    std::size_t n_neighbors = 69;
    std::string weights = "uniform";
};

// One bag for every model family; only the member matching `kind` is used.
struct Hyperparams {
    ModelKind kind = ModelKind::RandomForest;
    RfParams rf;
    DtParams dt;
    LrParams lr;
    MnbParams mnb;
    KnnParams knn;

    static Hyperparams defaults(ModelKind kind) {
        Hyperparams p;
        p.kind = kind;
        return p;
    }
};

struct TreeNode {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t feature = npos; // npos marks a leaf
    double threshold = 0.0;     // x[feature] <= threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    Category leaf = Category::Functional;

    bool is_leaf() const { return feature == npos; }
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    Category predict(const SparseVector& v) const;
};

class TrainedModel {
public:
    TrainedModel() = default;

    ModelKind kind() const { return params_.kind; }
    const Hyperparams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t n_features() const { return n_features_; }

    Category predict(const SparseVector& vector) const;
    std::vector<Category> predict_all(const std::vector<LabeledCommit>& commits) const;

    // Per-feature relevance for a category: Gini importance for trees
    // (category-independent), coefficients for logistic regression,
    // log-likelihoods for naive Bayes. Throws UnsupportedModel for
    // nearest-neighbor models.
    std::vector<double> feature_scores(Category category) const;

    std::string to_json() const;
    static TrainedModel from_json(const std::string& text);
    void save(const std::string& path) const;
    static TrainedModel load(const std::string& path);

private:
    friend TrainedModel train(const Hyperparams&, const std::vector<LabeledCommit>&,
                              std::uint64_t);

    Hyperparams params_;
    std::uint64_t seed_ = 0;
    std::size_t n_features_ = 0;

    // Tree ensembles (dt holds exactly one tree).
    std::vector<Tree> trees_;
    std::vector<double> tree_importance_;

    // One-vs-rest logistic regression.
    std::array<std::vector<double>, kCategoryCount> lr_weights_;
    std::array<double, kCategoryCount> lr_intercepts_{};

    // Multinomial naive Bayes.
    std::array<double, kCategoryCount> nb_log_prior_{};
    std::array<std::vector<double>, kCategoryCount> nb_log_likelihood_;

    // k-nearest neighbors keeps its training data.
    std::vector<SparseVector> knn_vectors_;
    std::vector<Category> knn_labels_;
    std::vector<double> knn_norms_sq_;
};

// Fits a model. Throws EmptyTrainingSet on empty input, KTooLarge when a
// nearest-neighbor model asks for more neighbors than there are training
// rows, and Error for unsupported hyperparameter values.
TrainedModel train(const Hyperparams& params,
                   const std::vector<LabeledCommit>& train_set,
                   std::uint64_t seed);

struct CategoryScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    std::map<Category, CategoryScores> per_category;
    double micro_f1 = 0.0;
    // confusion[actual][predicted]
    std::array<std::array<std::size_t, kCategoryCount>, kCategoryCount> confusion{};
};

EvalReport evaluate(const TrainedModel& model, const std::vector<LabeledCommit>& test_set);

// Stratified train/test split: the overall test size is round(n * test_frac),
// distributed over categories by largest remainder; both halves preserve the
// original data order. Throws TooFewPerCategory when a present category has
// fewer than two members.
std::pair<std::vector<LabeledCommit>, std::vector<LabeledCommit>> stratified_split(
    const std::vector<LabeledCommit>& data, double test_frac, std::uint64_t seed);

// Stratified k-fold cross-validation over a hyperparameter grid; returns the
// best grid point and its mean micro-F1. Ties keep the earliest grid entry.
// Throws FoldTooSmall when k_folds exceeds the size of a present category.
std::pair<Hyperparams, double> grid_search_cv(const std::vector<Hyperparams>& grid,
                                              const std::vector<LabeledCommit>& train_set,
                                              std::size_t k_folds,
                                              std::uint64_t seed);

// Paired comparison of two models on one test set.
McNemarResult mcnemar(const TrainedModel& model_a,
                      const TrainedModel& model_b,
                      const std::vector<LabeledCommit>& test_set);

// CSV with header "sha,project_id,message,label" (RFC-4180 quoting).
std::vector<LabeledCommit> load_labeled_csv(const std::string& path);
void save_labeled_csv(const std::vector<LabeledCommit>& data, const std::string& path);

} // namespace refdoc
