#include "refdoc/classify.hpp"

#include "refdoc/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace refdoc {

namespace {

using json = nlohmann::json;

constexpr double kGiniEps = 1e-12;

std::size_t category_index(Category c) {
    return static_cast<std::size_t>(c);
}

Category category_at(std::size_t i) {
    return kAllCategories.at(i);
}

// Lowest canonical category among the maxima of `counts`.
template <typename Counts>
Category argmax_category(const Counts& counts) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kCategoryCount; ++i) {
        if (counts[i] > counts[best]) {
            best = i;
        }
    }
    return category_at(best);
}

double gini(const std::array<std::size_t, kCategoryCount>& counts, std::size_t total) {
    if (total == 0) {
        return 0.0;
    }
    double sum_sq = 0.0;
    for (const std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

// Deterministic per-tree RNG; mixing through seed_seq keeps streams
// independent across trees regardless of platform.
std::mt19937_64 tree_rng(std::uint64_t seed, std::size_t tree_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tree_index),
                      static_cast<std::uint32_t>(tree_index >> 32)};
    return std::mt19937_64(seq);
}

struct TreeTrainer {
    const std::vector<const SparseVector*>& vectors;
    const std::vector<Category>& labels;
    std::size_t n_features;
    std::size_t max_depth;
    FeatureSampling sampling;
    std::mt19937_64* rng; // null when sampling == All
    std::vector<double>* importance; // accumulated Gini importance, may be null
    std::size_t n_total;

    Tree tree;

    double value_of(std::size_t sample, std::size_t feature) const {
        const auto& entries = vectors[sample]->entries;
        const auto it = entries.find(feature);
        return it == entries.end() ? 0.0 : it->second;
    }

    std::array<std::size_t, kCategoryCount> count_labels(const std::vector<std::size_t>& idx) const {
        std::array<std::size_t, kCategoryCount> counts{};
        for (const std::size_t i : idx) {
            ++counts[category_index(labels[i])];
        }
        return counts;
    }

    std::vector<std::size_t> candidate_features() {
        std::vector<std::size_t> all(n_features);
        std::iota(all.begin(), all.end(), std::size_t{0});
        if (sampling == FeatureSampling::All || n_features <= 1) {
            return all;
        }
        const auto m = static_cast<std::size_t>(
            std::ceil(std::sqrt(static_cast<double>(n_features))));
        // Partial Fisher-Yates, then ascending order so equal-quality splits
        // deterministically prefer the lowest feature index.
        for (std::size_t i = 0; i < m; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n_features - 1);
            std::swap(all[i], all[pick(*rng)]);
        }
        all.resize(m);
        std::sort(all.begin(), all.end());
        return all;
    }

    std::int32_t build(const std::vector<std::size_t>& idx, std::size_t depth) {
        const auto counts = count_labels(idx);
        const double node_gini = gini(counts, idx.size());

        const auto make_leaf = [&]() {
            TreeNode leaf;
            leaf.leaf = argmax_category(counts);
            tree.nodes.push_back(leaf);
            return static_cast<std::int32_t>(tree.nodes.size() - 1);
        };

        if (node_gini <= 0.0 || depth >= max_depth || idx.size() < 2) {
            return make_leaf();
        }

        // Best split: lowest weighted child Gini; scanning features and
        // thresholds in ascending order keeps the first optimum on ties.
        double best_score = node_gini - kGiniEps;
        std::size_t best_feature = TreeNode::npos;
        double best_threshold = 0.0;
        double best_left_gini = 0.0, best_right_gini = 0.0;
        std::size_t best_left_n = 0;

        std::vector<std::pair<double, Category>> column(idx.size());
        for (const std::size_t f : candidate_features()) {
            for (std::size_t i = 0; i < idx.size(); ++i) {
                column[i] = {value_of(idx[i], f), labels[idx[i]]};
            }
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::array<std::size_t, kCategoryCount> left{};
            auto right = count_labels(idx);
            for (std::size_t p = 0; p + 1 < column.size(); ++p) {
                const std::size_t c = category_index(column[p].second);
                ++left[c];
                --right[c];
                if (column[p].first == column[p + 1].first) {
                    continue;
                }
                const std::size_t nl = p + 1;
                const std::size_t nr = column.size() - nl;
                const double gl = gini(left, nl);
                const double gr = gini(right, nr);
                const double score = (static_cast<double>(nl) * gl + static_cast<double>(nr) * gr) /
                                     static_cast<double>(column.size());
                if (score < best_score - kGiniEps) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = (column[p].first + column[p + 1].first) / 2.0;
                    best_left_gini = gl;
                    best_right_gini = gr;
                    best_left_n = nl;
                }
            }
        }

        if (best_feature == TreeNode::npos) {
            return make_leaf();
        }

        if (importance != nullptr) {
            // Weighted impurity decrease, normalized by the training size.
            const double n_node = static_cast<double>(idx.size());
            const double nl = static_cast<double>(best_left_n);
            const double nr = n_node - nl;
            (*importance)[best_feature] +=
                (n_node * node_gini - nl * best_left_gini - nr * best_right_gini) /
                static_cast<double>(n_total);
        }

        std::vector<std::size_t> left_idx, right_idx;
        left_idx.reserve(idx.size());
        right_idx.reserve(idx.size());
        for (const std::size_t i : idx) {
            (value_of(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
        }

        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_threshold;
        tree.nodes.push_back(node);
        const auto self = static_cast<std::int32_t>(tree.nodes.size() - 1);
        const auto left_child = build(left_idx, depth + 1);
        const auto right_child = build(right_idx, depth + 1);
        tree.nodes[self].left = left_child;
        tree.nodes[self].right = right_child;
        return self;
    }
};

Tree train_tree(const std::vector<const SparseVector*>& vectors,
                const std::vector<Category>& labels,
                std::size_t n_features,
                std::size_t max_depth,
                FeatureSampling sampling,
                std::mt19937_64* rng,
                std::vector<double>* importance,
                std::size_t n_total) {
    TreeTrainer trainer{vectors, labels, n_features, max_depth, sampling, rng, importance, n_total};
    std::vector<std::size_t> idx(vectors.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    trainer.build(idx, 0);
    return std::move(trainer.tree);
}

double stable_log1p_exp(double m) {
    // log(1 + exp(m)) without overflow.
    if (m > 0.0) {
        return m + std::log1p(std::exp(-m));
    }
    return std::log1p(std::exp(m));
}

double soft_threshold(double x, double t) {
    if (x > t) {
        return x - t;
    }
    if (x < -t) {
        return x + t;
    }
    return 0.0;
}

// One binary L1-regularized logistic fit (proximal gradient with
// backtracking). Returns {weights, intercept}.
std::pair<std::vector<double>, double> fit_logistic_l1(
    const std::vector<const SparseVector*>& vectors,
    const std::vector<int>& targets, // +1 / -1
    std::size_t n_features,
    double lambda) {
    const std::size_t n = vectors.size();
    std::vector<double> w(n_features, 0.0);
    double b = 0.0;

    std::vector<double> margins(n); // y_i * (w.x_i + b)

    const auto smooth_loss = [&](const std::vector<double>& wv, double bv) {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = bv;
            for (const auto& [f, v] : vectors[i]->entries) {
                z += wv[f] * v;
            }
            loss += stable_log1p_exp(-targets[i] * z);
        }
        return loss;
    };

    double eta = 1.0;
    constexpr std::size_t kMaxIter = 1000;
    constexpr double kTol = 1e-4;

    for (std::size_t iter = 0; iter < kMaxIter; ++iter) {
        // Loss and gradient at (w, b).
        std::vector<double> grad(n_features, 0.0);
        double grad_b = 0.0;
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = b;
            for (const auto& [f, v] : vectors[i]->entries) {
                z += w[f] * v;
            }
            const double m = targets[i] * z;
            loss += stable_log1p_exp(-m);
            // d/dz log(1+exp(-y z)) = -y * sigma(-y z)
            const double s = 1.0 / (1.0 + std::exp(m));
            const double coef = -targets[i] * s;
            for (const auto& [f, v] : vectors[i]->entries) {
                grad[f] += coef * v;
            }
            grad_b += coef;
        }

        // Backtracking proximal step.
        std::vector<double> w_new(n_features);
        double b_new = 0.0;
        bool first_try = true;
        while (true) {
            for (std::size_t f = 0; f < n_features; ++f) {
                w_new[f] = soft_threshold(w[f] - eta * grad[f], eta * lambda);
            }
            b_new = b - eta * grad_b;

            double quad = 0.0, lin = 0.0;
            for (std::size_t f = 0; f < n_features; ++f) {
                const double d = w_new[f] - w[f];
                quad += d * d;
                lin += grad[f] * d;
            }
            const double db = b_new - b;
            quad += db * db;
            lin += grad_b * db;

            if (smooth_loss(w_new, b_new) <= loss + lin + quad / (2.0 * eta) + 1e-12) {
                if (first_try) {
                    eta = std::min(1.0, eta * 2.0); // step was easy; try longer next time
                }
                break;
            }
            first_try = false;
            eta /= 2.0;
            if (eta < 1e-12) {
                break;
            }
        }

        double max_delta = std::abs(b_new - b);
        for (std::size_t f = 0; f < n_features; ++f) {
            max_delta = std::max(max_delta, std::abs(w_new[f] - w[f]));
        }
        w.swap(w_new);
        b = b_new;
        if (max_delta <= kTol) {
            break;
        }
    }
    return {std::move(w), b};
}

std::size_t infer_n_features(const std::vector<LabeledCommit>& data) {
    std::size_t n = 0;
    for (const auto& item : data) {
        if (!item.vector.entries.empty()) {
            n = std::max(n, item.vector.entries.rbegin()->first + 1);
        }
    }
    return n;
}

void validate_params(const Hyperparams& p, std::size_t train_size) {
    switch (p.kind) {
        case ModelKind::RandomForest:
            if (p.rf.criterion != "gini") {
                throw Error("unsupported split criterion: " + p.rf.criterion);
            }
            if (p.rf.max_depth == 0 || p.rf.n_estimators == 0) {
                throw Error("random forest needs positive depth and tree count");
            }
            break;
        case ModelKind::DecisionTree:
            if (p.dt.criterion != "gini") {
                throw Error("unsupported split criterion: " + p.dt.criterion);
            }
            if (p.dt.max_depth == 0) {
                throw Error("decision tree needs positive depth");
            }
            break;
        case ModelKind::LogisticRegression:
            if (p.lr.penalty != "l1") {
                throw Error("unsupported penalty: " + p.lr.penalty);
            }
            if (!(p.lr.c > 0.0)) {
                throw Error("regularization parameter c must be positive");
            }
            break;
        case ModelKind::MultinomialNB:
            if (!(p.mnb.alpha > 0.0)) {
                throw Error("smoothing alpha must be positive");
            }
            break;
        case ModelKind::KNearest:
            if (p.knn.weights != "uniform") {
                throw Error("unsupported neighbor weighting: " + p.knn.weights);
            }
            if (p.knn.n_neighbors == 0) {
                throw Error("n_neighbors must be positive");
            }
            if (p.knn.n_neighbors > train_size) {
                std::ostringstream msg;
                msg << "n_neighbors " << p.knn.n_neighbors << " > training size " << train_size;
                throw KTooLarge(msg.str());
            }
            break;
    }
}

} // namespace

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    for (const ModelKind k : {ModelKind::RandomForest, ModelKind::DecisionTree,
                              ModelKind::LogisticRegression, ModelKind::MultinomialNB,
                              ModelKind::KNearest}) {
        if (model_kind_name(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

Category Tree::predict(const SparseVector& v) const {
    std::size_t at = 0;
    while (!nodes[at].is_leaf()) {
        const auto it = v.entries.find(nodes[at].feature);
        const double value = it == v.entries.end() ? 0.0 : it->second;
        at = static_cast<std::size_t>(value <= nodes[at].threshold ? nodes[at].left
                                                                   : nodes[at].right);
    }
    return nodes[at].leaf;
}

TrainedModel train(const Hyperparams& params,
                   const std::vector<LabeledCommit>& train_set,
                   std::uint64_t seed) {
    if (train_set.empty()) {
        throw EmptyTrainingSet();
    }
    validate_params(params, train_set.size());

    TrainedModel model;
    model.params_ = params;
    model.seed_ = seed;
    model.n_features_ = infer_n_features(train_set);

    std::vector<const SparseVector*> vectors;
    std::vector<Category> labels;
    vectors.reserve(train_set.size());
    labels.reserve(train_set.size());
    for (const auto& item : train_set) {
        vectors.push_back(&item.vector);
        labels.push_back(item.label);
    }

    switch (params.kind) {
        case ModelKind::DecisionTree: {
            model.tree_importance_.assign(model.n_features_, 0.0);
            model.trees_.push_back(train_tree(vectors, labels, model.n_features_,
                                              params.dt.max_depth, FeatureSampling::All, nullptr,
                                              &model.tree_importance_, vectors.size()));
            break;
        }
        case ModelKind::RandomForest: {
            model.tree_importance_.assign(model.n_features_, 0.0);
            model.trees_.reserve(params.rf.n_estimators);
            for (std::size_t t = 0; t < params.rf.n_estimators; ++t) {
                auto rng = tree_rng(seed, t);
                std::vector<const SparseVector*> tree_vectors;
                std::vector<Category> tree_labels;
                const std::vector<const SparseVector*>* use_vectors = &vectors;
                const std::vector<Category>* use_labels = &labels;
                if (params.rf.bootstrap) {
                    std::uniform_int_distribution<std::size_t> pick(0, vectors.size() - 1);
                    tree_vectors.reserve(vectors.size());
                    tree_labels.reserve(vectors.size());
                    for (std::size_t i = 0; i < vectors.size(); ++i) {
                        const std::size_t j = pick(rng);
                        tree_vectors.push_back(vectors[j]);
                        tree_labels.push_back(labels[j]);
                    }
                    use_vectors = &tree_vectors;
                    use_labels = &tree_labels;
                }
                model.trees_.push_back(train_tree(*use_vectors, *use_labels, model.n_features_,
                                                  params.rf.max_depth, params.rf.feature_sampling,
                                                  &rng, &model.tree_importance_,
                                                  use_vectors->size()));
            }
            break;
        }
        case ModelKind::LogisticRegression: {
            const double lambda = 1.0 / params.lr.c;
            for (std::size_t c = 0; c < kCategoryCount; ++c) {
                std::vector<int> targets(labels.size());
                for (std::size_t i = 0; i < labels.size(); ++i) {
                    targets[i] = labels[i] == category_at(c) ? 1 : -1;
                }
                auto [w, b] = fit_logistic_l1(vectors, targets, model.n_features_, lambda);
                model.lr_weights_[c] = std::move(w);
                model.lr_intercepts_[c] = b;
            }
            break;
        }
        case ModelKind::MultinomialNB: {
            const double alpha = params.mnb.alpha;
            const double v_size = static_cast<double>(model.n_features_);
            std::array<double, kCategoryCount> class_count{};
            std::array<std::vector<double>, kCategoryCount> feature_sum;
            for (auto& row : feature_sum) {
                row.assign(model.n_features_, 0.0);
            }
            for (std::size_t i = 0; i < vectors.size(); ++i) {
                const std::size_t c = category_index(labels[i]);
                class_count[c] += 1.0;
                for (const auto& [f, v] : vectors[i]->entries) {
                    feature_sum[c][f] += v;
                }
            }
            for (std::size_t c = 0; c < kCategoryCount; ++c) {
                if (class_count[c] == 0.0) {
                    model.nb_log_prior_[c] = -std::numeric_limits<double>::infinity();
                } else {
                    model.nb_log_prior_[c] =
                        std::log(class_count[c] / static_cast<double>(vectors.size()));
                }
                const double total =
                    std::accumulate(feature_sum[c].begin(), feature_sum[c].end(), 0.0);
                auto& row = model.nb_log_likelihood_[c];
                row.assign(model.n_features_, 0.0);
                const double denom = std::log(total + alpha * v_size);
                for (std::size_t f = 0; f < model.n_features_; ++f) {
                    row[f] = std::log(feature_sum[c][f] + alpha) - denom;
                }
            }
            break;
        }
        case ModelKind::KNearest: {
            model.knn_vectors_.reserve(train_set.size());
            model.knn_norms_sq_.reserve(train_set.size());
            for (const auto& item : train_set) {
                model.knn_vectors_.push_back(item.vector);
                const double n = item.vector.norm();
                model.knn_norms_sq_.push_back(n * n);
            }
            model.knn_labels_ = labels;
            break;
        }
    }
    return model;
}

Category TrainedModel::predict(const SparseVector& vector) const {
    switch (params_.kind) {
        case ModelKind::DecisionTree:
            return trees_.front().predict(vector);
        case ModelKind::RandomForest: {
            std::array<std::size_t, kCategoryCount> votes{};
            for (const auto& tree : trees_) {
                ++votes[category_index(tree.predict(vector))];
            }
            return argmax_category(votes);
        }
        case ModelKind::LogisticRegression: {
            std::array<double, kCategoryCount> scores{};
            for (std::size_t c = 0; c < kCategoryCount; ++c) {
                double z = lr_intercepts_[c];
                for (const auto& [f, v] : vector.entries) {
                    if (f < lr_weights_[c].size()) {
                        z += lr_weights_[c][f] * v;
                    }
                }
                scores[c] = z;
            }
            return argmax_category(scores);
        }
        case ModelKind::MultinomialNB: {
            std::array<double, kCategoryCount> scores{};
            for (std::size_t c = 0; c < kCategoryCount; ++c) {
                double s = nb_log_prior_[c];
                for (const auto& [f, v] : vector.entries) {
                    if (f < nb_log_likelihood_[c].size()) {
                        s += v * nb_log_likelihood_[c][f];
                    }
                }
                scores[c] = s;
            }
            return argmax_category(scores);
        }
        case ModelKind::KNearest: {
            const double q_norm_sq = [&] {
                double s = 0.0;
                for (const auto& [f, v] : vector.entries) {
                    s += v * v;
                }
                return s;
            }();
            // (distance^2, training index); ties prefer the earlier index.
            std::vector<std::pair<double, std::size_t>> dist(knn_vectors_.size());
            for (std::size_t i = 0; i < knn_vectors_.size(); ++i) {
                const double d2 =
                    q_norm_sq + knn_norms_sq_[i] - 2.0 * vector.dot(knn_vectors_[i]);
                dist[i] = {d2, i};
            }
            const std::size_t k = std::min(params_.knn.n_neighbors, dist.size());
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                              dist.end());
            std::array<std::size_t, kCategoryCount> votes{};
            for (std::size_t i = 0; i < k; ++i) {
                ++votes[category_index(knn_labels_[dist[i].second])];
            }
            return argmax_category(votes);
        }
    }
    return Category::Functional;
}

std::vector<Category> TrainedModel::predict_all(const std::vector<LabeledCommit>& commits) const {
    std::vector<Category> out;
    out.reserve(commits.size());
    for (const auto& item : commits) {
        out.push_back(predict(item.vector));
    }
    return out;
}

std::vector<double> TrainedModel::feature_scores(Category category) const {
    switch (params_.kind) {
        case ModelKind::DecisionTree:
        case ModelKind::RandomForest:
            return tree_importance_;
        case ModelKind::LogisticRegression:
            return lr_weights_[category_index(category)];
        case ModelKind::MultinomialNB:
            return nb_log_likelihood_[category_index(category)];
        case ModelKind::KNearest:
            throw UnsupportedModel("nearest-neighbor models have no feature scores");
    }
    return {};
}

EvalReport evaluate(const TrainedModel& model, const std::vector<LabeledCommit>& test_set) {
    EvalReport report;
    for (const auto& item : test_set) {
        const Category predicted = model.predict(item.vector);
        ++report.confusion[category_index(item.label)][category_index(predicted)];
    }

    std::size_t correct = 0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        correct += report.confusion[c][c];
        std::size_t tp = report.confusion[c][c];
        std::size_t fn = 0, fp = 0;
        for (std::size_t other = 0; other < kCategoryCount; ++other) {
            if (other != c) {
                fn += report.confusion[c][other];
                fp += report.confusion[other][c];
            }
        }
        CategoryScores scores;
        scores.precision = (tp + fp) == 0 ? 0.0
                                          : static_cast<double>(tp) / static_cast<double>(tp + fp);
        scores.recall = (tp + fn) == 0 ? 0.0
                                       : static_cast<double>(tp) / static_cast<double>(tp + fn);
        scores.f1 = (scores.precision + scores.recall) == 0.0
                        ? 0.0
                        : 2.0 * scores.precision * scores.recall /
                              (scores.precision + scores.recall);
        report.per_category[category_at(c)] = scores;
    }
    report.micro_f1 =
        test_set.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test_set.size());
    return report;
}

std::pair<std::vector<LabeledCommit>, std::vector<LabeledCommit>> stratified_split(
    const std::vector<LabeledCommit>& data, double test_frac, std::uint64_t seed) {
    if (!(test_frac > 0.0 && test_frac < 1.0)) {
        throw Error("test fraction must lie strictly between 0 and 1");
    }

    std::array<std::vector<std::size_t>, kCategoryCount> per_cat;
    for (std::size_t i = 0; i < data.size(); ++i) {
        per_cat[category_index(data[i].label)].push_back(i);
    }
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        if (!per_cat[c].empty() && per_cat[c].size() < 2) {
            throw TooFewPerCategory(std::string(category_name(category_at(c))) + " has only " +
                                    std::to_string(per_cat[c].size()) + " example");
        }
    }

    // Global test size, then per-category quotas by largest remainder.
    const auto total_test = static_cast<std::size_t>(
        std::floor(static_cast<double>(data.size()) * test_frac + 0.5));
    std::array<std::size_t, kCategoryCount> quota{};
    std::size_t assigned = 0;
    std::vector<std::pair<double, std::size_t>> remainders; // (-fraction, category)
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const double exact = static_cast<double>(per_cat[c].size()) * test_frac;
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[c];
        remainders.push_back({-(exact - std::floor(exact)), c});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < remainders.size() && assigned < total_test; ++i) {
        const std::size_t c = remainders[i].second;
        if (quota[c] < per_cat[c].size()) {
            ++quota[c];
            ++assigned;
        }
    }

    std::mt19937_64 rng(seed);
    std::vector<bool> in_test(data.size(), false);
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        auto& idx = per_cat[c];
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < quota[c] && i < idx.size(); ++i) {
            in_test[idx[i]] = true;
        }
    }

    std::pair<std::vector<LabeledCommit>, std::vector<LabeledCommit>> result;
    for (std::size_t i = 0; i < data.size(); ++i) {
        (in_test[i] ? result.second : result.first).push_back(data[i]);
    }
    return result;
}

std::pair<Hyperparams, double> grid_search_cv(const std::vector<Hyperparams>& grid,
                                              const std::vector<LabeledCommit>& train_set,
                                              std::size_t k_folds,
                                              std::uint64_t seed) {
    if (grid.empty()) {
        throw Error("empty hyperparameter grid");
    }
    if (train_set.empty()) {
        throw EmptyTrainingSet();
    }
    if (k_folds < 2) {
        throw Error("cross-validation needs at least 2 folds");
    }

    std::array<std::vector<std::size_t>, kCategoryCount> per_cat;
    for (std::size_t i = 0; i < train_set.size(); ++i) {
        per_cat[category_index(train_set[i].label)].push_back(i);
    }
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        if (!per_cat[c].empty() && per_cat[c].size() < k_folds) {
            throw FoldTooSmall(std::string(category_name(category_at(c))) + " has " +
                               std::to_string(per_cat[c].size()) + " examples < " +
                               std::to_string(k_folds) + " folds");
        }
    }

    // Stratified folds: shuffle each category once, deal round-robin.
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> fold_of(train_set.size(), 0);
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        auto& idx = per_cat[c];
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            fold_of[idx[i]] = i % k_folds;
        }
    }

    double best_score = -1.0;
    std::size_t best_point = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double score_sum = 0.0;
        for (std::size_t fold = 0; fold < k_folds; ++fold) {
            std::vector<LabeledCommit> fold_train, fold_test;
            for (std::size_t i = 0; i < train_set.size(); ++i) {
                (fold_of[i] == fold ? fold_test : fold_train).push_back(train_set[i]);
            }
            const auto model = train(grid[g], fold_train, seed);
            score_sum += evaluate(model, fold_test).micro_f1;
        }
        const double mean = score_sum / static_cast<double>(k_folds);
        if (mean > best_score) { // strict: ties keep the earliest grid point
            best_score = mean;
            best_point = g;
        }
    }
    return {grid[best_point], best_score};
}

McNemarResult mcnemar(const TrainedModel& model_a,
                      const TrainedModel& model_b,
                      const std::vector<LabeledCommit>& test_set) {
    std::size_t b = 0, c = 0;
    for (const auto& item : test_set) {
        const bool a_ok = model_a.predict(item.vector) == item.label;
        const bool b_ok = model_b.predict(item.vector) == item.label;
        if (a_ok && !b_ok) {
            ++b;
        } else if (!a_ok && b_ok) {
            ++c;
        }
    }
    return mcnemar_from_counts(b, c);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json params_to_json(const Hyperparams& p) {
    switch (p.kind) {
        case ModelKind::RandomForest:
            return {{"max_depth", p.rf.max_depth},
                    {"n_estimators", p.rf.n_estimators},
                    {"criterion", p.rf.criterion},
                    {"bootstrap", p.rf.bootstrap},
                    {"feature_sampling",
                     p.rf.feature_sampling == FeatureSampling::Sqrt ? "sqrt" : "all"}};
        case ModelKind::DecisionTree:
            return {{"criterion", p.dt.criterion}, {"max_depth", p.dt.max_depth}};
        case ModelKind::LogisticRegression:
            return {{"penalty", p.lr.penalty}, {"c", p.lr.c}};
        case ModelKind::MultinomialNB:
            return {{"alpha", p.mnb.alpha}};
        case ModelKind::KNearest:
            return {{"n_neighbors", p.knn.n_neighbors}, {"weights", p.knn.weights}};
    }
    return {};
}

Hyperparams params_from_json(ModelKind kind, const json& j) {
    Hyperparams p = Hyperparams::defaults(kind);
    switch (kind) {
        case ModelKind::RandomForest:
            p.rf.max_depth = j.at("max_depth").get<std::size_t>();
            p.rf.n_estimators = j.at("n_estimators").get<std::size_t>();
            p.rf.criterion = j.at("criterion").get<std::string>();
            p.rf.bootstrap = j.at("bootstrap").get<bool>();
            p.rf.feature_sampling = j.at("feature_sampling").get<std::string>() == "all"
                                        ? FeatureSampling::All
                                        : FeatureSampling::Sqrt;
            break;
        case ModelKind::DecisionTree:
            p.dt.criterion = j.at("criterion").get<std::string>();
            p.dt.max_depth = j.at("max_depth").get<std::size_t>();
            break;
        case ModelKind::LogisticRegression:
            p.lr.penalty = j.at("penalty").get<std::string>();
            p.lr.c = j.at("c").get<double>();
            break;
        case ModelKind::MultinomialNB:
            p.mnb.alpha = j.at("alpha").get<double>();
            break;
        case ModelKind::KNearest:
            p.knn.n_neighbors = j.at("n_neighbors").get<std::size_t>();
            p.knn.weights = j.at("weights").get<std::string>();
            break;
    }
    return p;
}

json tree_to_json(const Tree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        if (n.is_leaf()) {
            nodes.push_back({-1, 0.0, -1, -1, static_cast<int>(n.leaf)});
        } else {
            nodes.push_back({static_cast<std::int64_t>(n.feature), n.threshold, n.left, n.right,
                             -1});
        }
    }
    return nodes;
}

Tree tree_from_json(const json& j) {
    Tree tree;
    for (const auto& row : j) {
        TreeNode n;
        const auto feature = row.at(0).get<std::int64_t>();
        if (feature < 0) {
            n.leaf = static_cast<Category>(row.at(4).get<int>());
        } else {
            n.feature = static_cast<std::size_t>(feature);
            n.threshold = row.at(1).get<double>();
            n.left = row.at(2).get<std::int32_t>();
            n.right = row.at(3).get<std::int32_t>();
        }
        tree.nodes.push_back(n);
    }
    return tree;
}

json sparse_to_json(const SparseVector& v) {
    json out = json::array();
    for (const auto& [f, w] : v.entries) {
        out.push_back({f, w});
    }
    return out;
}

SparseVector sparse_from_json(const json& j) {
    SparseVector v;
    for (const auto& e : j) {
        v.entries[e.at(0).get<std::size_t>()] = e.at(1).get<double>();
    }
    return v;
}

} // namespace

std::string TrainedModel::to_json() const {
    json j;
    j["version"] = 1;
    j["kind"] = std::string(model_kind_name(params_.kind));
    j["params"] = params_to_json(params_);
    j["seed"] = seed_;

    json payload;
    payload["n_features"] = n_features_;
    switch (params_.kind) {
        case ModelKind::DecisionTree:
        case ModelKind::RandomForest: {
            json trees = json::array();
            for (const auto& t : trees_) {
                trees.push_back(tree_to_json(t));
            }
            payload["trees"] = std::move(trees);
            payload["importance"] = tree_importance_;
            break;
        }
        case ModelKind::LogisticRegression: {
            payload["weights"] = lr_weights_;
            payload["intercepts"] = lr_intercepts_;
            break;
        }
        case ModelKind::MultinomialNB: {
            // -inf (empty class) is not representable in JSON; store the
            // prior row as strings produced by a fixed format instead.
            json priors = json::array();
            for (const double p : nb_log_prior_) {
                priors.push_back(std::isinf(p) ? json("-inf") : json(p));
            }
            payload["log_prior"] = std::move(priors);
            payload["log_likelihood"] = nb_log_likelihood_;
            break;
        }
        case ModelKind::KNearest: {
            json vectors = json::array();
            for (const auto& v : knn_vectors_) {
                vectors.push_back(sparse_to_json(v));
            }
            payload["vectors"] = std::move(vectors);
            json labels = json::array();
            for (const Category c : knn_labels_) {
                labels.push_back(static_cast<int>(c));
            }
            payload["labels"] = std::move(labels);
            break;
        }
    }
    j["payload"] = std::move(payload);
    return j.dump(2) + "\n";
}

TrainedModel TrainedModel::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedJson(e.what());
    }
    try {
        const auto kind = parse_model_kind(j.at("kind").get<std::string>());
        if (!kind) {
            throw MalformedJson("unknown model kind: " + j.at("kind").get<std::string>());
        }
        TrainedModel model;
        model.params_ = params_from_json(*kind, j.at("params"));
        model.seed_ = j.at("seed").get<std::uint64_t>();
        const auto& payload = j.at("payload");
        model.n_features_ = payload.at("n_features").get<std::size_t>();
        switch (*kind) {
            case ModelKind::DecisionTree:
            case ModelKind::RandomForest:
                for (const auto& t : payload.at("trees")) {
                    model.trees_.push_back(tree_from_json(t));
                }
                model.tree_importance_ = payload.at("importance").get<std::vector<double>>();
                break;
            case ModelKind::LogisticRegression:
                model.lr_weights_ =
                    payload.at("weights").get<std::array<std::vector<double>, kCategoryCount>>();
                model.lr_intercepts_ =
                    payload.at("intercepts").get<std::array<double, kCategoryCount>>();
                break;
            case ModelKind::MultinomialNB: {
                const auto& priors = payload.at("log_prior");
                for (std::size_t c = 0; c < kCategoryCount; ++c) {
                    if (priors.at(c).is_string()) {
                        model.nb_log_prior_[c] = -std::numeric_limits<double>::infinity();
                    } else {
                        model.nb_log_prior_[c] = priors.at(c).get<double>();
                    }
                }
                model.nb_log_likelihood_ =
                    payload.at("log_likelihood")
                        .get<std::array<std::vector<double>, kCategoryCount>>();
                break;
            }
            case ModelKind::KNearest: {
                for (const auto& v : payload.at("vectors")) {
                    model.knn_vectors_.push_back(sparse_from_json(v));
                    const double n = model.knn_vectors_.back().norm();
                    model.knn_norms_sq_.push_back(n * n);
                }
                for (const auto& l : payload.at("labels")) {
                    model.knn_labels_.push_back(static_cast<Category>(l.get<int>()));
                }
                break;
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw MalformedJson(e.what());
    }
}

void TrainedModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << to_json();
    if (!out) {
        throw IoError("short write to " + path);
    }
}

TrainedModel TrainedModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

// ---------------------------------------------------------------------------
// Labeled CSV
// ---------------------------------------------------------------------------

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

// RFC-4180 rows; quoted fields may contain commas, quotes, and newlines.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    const auto end_field = [&]() {
        row.push_back(std::move(field));
        field.clear();
    };
    const auto end_row = [&]() {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < text.size()) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') {
                field.pop_back();
            }
            end_row();
        } else {
            field.push_back(c);
        }
        ++i;
    }
    if (!field.empty() || !row.empty()) {
        end_row();
    }
    return rows;
}

} // namespace

std::vector<LabeledCommit> load_labeled_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    auto rows = parse_csv(text);
    if (rows.empty()) {
        return {};
    }
    std::size_t start = 0;
    if (rows[0] == std::vector<std::string>{"sha", "project_id", "message", "label"}) {
        start = 1;
    }
    std::vector<LabeledCommit> out;
    for (std::size_t r = start; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) {
            continue; // trailing blank line
        }
        if (row.size() != 4) {
            throw IoError(path + ": row " + std::to_string(r + 1) + " has " +
                          std::to_string(row.size()) + " fields, expected 4");
        }
        const auto label = parse_category(row[3]);
        if (!label) {
            throw IoError(path + ": unknown label '" + row[3] + "' in row " +
                          std::to_string(r + 1));
        }
        LabeledCommit item;
        item.commit.sha = row[0];
        item.commit.project_id = row[1];
        item.commit.message = row[2];
        item.label = *label;
        out.push_back(std::move(item));
    }
    return out;
}

void save_labeled_csv(const std::vector<LabeledCommit>& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << "sha,project_id,message,label\n";
    for (const auto& item : data) {
        out << csv_escape(item.commit.sha) << ',' << csv_escape(item.commit.project_id) << ','
            << csv_escape(item.commit.message) << ',' << category_name(item.label) << '\n';
    }
    if (!out) {
        throw IoError("short write to " + path);
    }
}

} // namespace refdoc
