#include "refdoc/classify.hpp"

#include "refdoc/errors.hpp"
#include "refdoc/textprep.hpp"
#include "support/synthetic.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

using namespace refdoc;

namespace {

SparseVector sv(std::initializer_list<std::pair<std::size_t, double>> entries) {
    SparseVector v;
    for (const auto& [f, w] : entries) {
        if (w != 0.0) {
            v.entries[f] = w;
        }
    }
    return v;
}

LabeledCommit lc(Category label, SparseVector vector, std::string sha = "") {
    LabeledCommit item;
    item.label = label;
    item.vector = std::move(vector);
    item.commit.sha = std::move(sha);
    item.commit.project_id = "test";
    return item;
}

// Exhaustive best-split search on dense data, used to cross-check the tree
// learner: lowest weighted child Gini wins, candidates are midpoints between
// consecutive distinct sorted values, ties keep the lowest feature index and
// then the lowest threshold, and a split must beat the parent impurity.
struct OracleSplit {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
};

OracleSplit oracle_best_split(const std::vector<std::vector<double>>& xs,
                              const std::vector<Category>& ys) {
    const auto gini_of = [](const std::array<std::size_t, kCategoryCount>& counts,
                            std::size_t n) {
        if (n == 0) {
            return 0.0;
        }
        double s = 0.0;
        for (const std::size_t c : counts) {
            const double p = static_cast<double>(c) / static_cast<double>(n);
            s += p * p;
        }
        return 1.0 - s;
    };

    std::array<std::size_t, kCategoryCount> total{};
    for (const Category y : ys) {
        ++total[static_cast<std::size_t>(y)];
    }
    const double parent = gini_of(total, ys.size());

    OracleSplit best;
    double best_score = parent - 1e-12;
    const std::size_t n_features = xs.front().size();
    for (std::size_t f = 0; f < n_features; ++f) {
        std::vector<double> values;
        for (const auto& row : xs) {
            values.push_back(row[f]);
        }
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double thr = (values[i] + values[i + 1]) / 2.0;
            std::array<std::size_t, kCategoryCount> left{}, right{};
            std::size_t nl = 0;
            for (std::size_t r = 0; r < xs.size(); ++r) {
                if (xs[r][f] <= thr) {
                    ++left[static_cast<std::size_t>(ys[r])];
                    ++nl;
                } else {
                    ++right[static_cast<std::size_t>(ys[r])];
                }
            }
            const std::size_t nr = xs.size() - nl;
            const double score = (static_cast<double>(nl) * gini_of(left, nl) +
                                  static_cast<double>(nr) * gini_of(right, nr)) /
                                 static_cast<double>(xs.size());
            if (score < best_score - 1e-12) {
                best_score = score;
                best = {true, f, thr};
            }
        }
    }
    return best;
}

nlohmann::json model_json(const TrainedModel& model) {
    return nlohmann::json::parse(model.to_json());
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("naive Bayes matches hand arithmetic on a two-word corpus", "[classify]") {
    // Features: 0 = "bad", 1 = "good". Two docs per class, one word each.
    std::vector<LabeledCommit> data = {
        lc(Category::Functional, sv({{1, 1.0}})),
        lc(Category::Functional, sv({{1, 1.0}})),
        lc(Category::BugFix, sv({{0, 1.0}})),
        lc(Category::BugFix, sv({{0, 1.0}})),
    };
    Hyperparams p = Hyperparams::defaults(ModelKind::MultinomialNB);
    p.mnb.alpha = 1.0;
    const auto model = train(p, data, 42);

    CHECK(model.predict(sv({{1, 1.0}})) == Category::Functional);
    CHECK(model.predict(sv({{0, 1.0}})) == Category::BugFix);

    // P(good|Functional) = (2+1)/(2+2), P(good|BugFix) = (0+1)/(2+2).
    const auto f_scores = model.feature_scores(Category::Functional);
    const auto b_scores = model.feature_scores(Category::BugFix);
    REQUIRE(f_scores.size() == 2);
    CHECK(f_scores[1] == Catch::Approx(std::log(3.0 / 4.0)).margin(1e-12));
    CHECK(f_scores[0] == Catch::Approx(std::log(1.0 / 4.0)).margin(1e-12));
    CHECK(b_scores[1] == Catch::Approx(std::log(1.0 / 4.0)).margin(1e-12));
}

TEST_CASE("naive Bayes falls back to priors on an empty vector", "[classify]") {
    std::vector<LabeledCommit> data = {
        lc(Category::BugFix, sv({{0, 1.0}})),
        lc(Category::BugFix, sv({{0, 1.0}})),
        lc(Category::BugFix, sv({{1, 1.0}})),
        lc(Category::CodeSmell, sv({{1, 1.0}})),
        lc(Category::CodeSmell, sv({{0, 1.0}})),
    };
    Hyperparams p = Hyperparams::defaults(ModelKind::MultinomialNB);
    const auto model = train(p, data, 1);
    CHECK(model.predict(SparseVector{}) == Category::BugFix); // highest prior

    // Balanced priors tie; the lowest canonical category wins.
    data.push_back(lc(Category::CodeSmell, sv({{1, 1.0}})));
    const auto balanced = train(p, data, 1);
    CHECK(balanced.predict(SparseVector{}) == Category::BugFix);
}

TEST_CASE("decision tree finds the single separating midpoint", "[classify]") {
    std::vector<LabeledCommit> data = {
        lc(Category::Functional, sv({{0, 0.1}})),
        lc(Category::Functional, sv({{0, 0.2}})),
        lc(Category::BugFix, sv({{0, 0.8}})),
        lc(Category::BugFix, sv({{0, 0.9}})),
    };
    const auto model = train(Hyperparams::defaults(ModelKind::DecisionTree), data, 42);

    CHECK(model.predict(sv({{0, 0.15}})) == Category::Functional);
    CHECK(model.predict(sv({{0, 0.5}})) == Category::Functional); // boundary goes left
    CHECK(model.predict(sv({{0, 0.51}})) == Category::BugFix);

    const auto j = model_json(model);
    const auto& tree = j.at("payload").at("trees").at(0);
    REQUIRE(tree.size() == 3); // one split, two leaves
    CHECK(tree.at(0).at(0).get<int>() == 0);
    CHECK(tree.at(0).at(1).get<double>() == 0.5);
}

TEST_CASE("decision tree root split agrees with an exhaustive search", "[classify]") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> n_dist(4, 12);
    std::uniform_int_distribution<int> v_dist(0, 4);
    std::uniform_int_distribution<int> y_dist(0, 2);

    for (int trial = 0; trial < 100; ++trial) {
        const int n = n_dist(rng);
        std::vector<std::vector<double>> xs;
        std::vector<Category> ys;
        std::vector<LabeledCommit> data;
        for (int i = 0; i < n; ++i) {
            const double a = v_dist(rng) * 0.25;
            const double b = v_dist(rng) * 0.25;
            const auto y = static_cast<Category>(y_dist(rng));
            xs.push_back({a, b});
            ys.push_back(y);
            data.push_back(lc(y, sv({{0, a}, {1, b}})));
        }

        const auto model = train(Hyperparams::defaults(ModelKind::DecisionTree), data, 0);
        const auto root = model_json(model).at("payload").at("trees").at(0).at(0);
        const auto expected = oracle_best_split(xs, ys);
        if (!expected.found) {
            CHECK(root.at(0).get<int>() == -1); // single leaf
        } else {
            REQUIRE(root.at(0).get<int>() >= 0);
            CHECK(root.at(0).get<std::size_t>() == expected.feature);
            CHECK(root.at(1).get<double>() == Catch::Approx(expected.threshold).margin(1e-15));
        }
    }
}

TEST_CASE("nearest neighbors breaks ties by index then canonical order", "[classify]") {
    std::vector<LabeledCommit> data = {
        lc(Category::BugFix, sv({{0, 1.0}})),
        lc(Category::Functional, sv({{1, 1.0}})),
        lc(Category::CodeSmell, sv({{0, 1.0}, {1, 1.0}, {2, 5.0}})),
    };

    Hyperparams p = Hyperparams::defaults(ModelKind::KNearest);
    p.knn.n_neighbors = 1;
    const auto one = train(p, data, 42);
    // Exact training vector comes back with its own label.
    CHECK(one.predict(sv({{0, 1.0}})) == Category::BugFix);
    CHECK(one.predict(sv({{1, 1.0}})) == Category::Functional);
    // The query is equidistant from rows 0 and 1; the earlier row wins.
    CHECK(one.predict(sv({{2, 1.0}})) == Category::BugFix);

    p.knn.n_neighbors = 2;
    const auto two = train(p, data, 42);
    // One vote each for BugFix and Functional; Functional is canonical-first.
    CHECK(two.predict(sv({{2, 1.0}})) == Category::Functional);
}

TEST_CASE("nearest neighbors rejects k larger than the training set", "[classify]") {
    std::vector<LabeledCommit> data = {
        lc(Category::Functional, sv({{0, 1.0}})),
        lc(Category::BugFix, sv({{1, 1.0}})),
        lc(Category::BugFix, sv({{2, 1.0}})),
    };
    Hyperparams p = Hyperparams::defaults(ModelKind::KNearest);
    p.knn.n_neighbors = 5;
    CHECK_THROWS_AS(train(p, data, 42), KTooLarge);
}

TEST_CASE("single-tree forest with full feature splits equals the tree", "[classify]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<LabeledCommit> data;
    for (int i = 0; i < 40; ++i) {
        const double a = u(rng), b = u(rng), c = u(rng);
        const Category y = a > 0.5 ? (b > 0.5 ? Category::Functional : Category::BugFix)
                                   : (c > 0.5 ? Category::InternalQA : Category::CodeSmell);
        data.push_back(lc(y, sv({{0, a}, {1, b}, {2, c}})));
    }

    Hyperparams forest = Hyperparams::defaults(ModelKind::RandomForest);
    forest.rf.n_estimators = 1;
    forest.rf.feature_sampling = FeatureSampling::All;
    forest.rf.max_depth = 75;
    Hyperparams tree = Hyperparams::defaults(ModelKind::DecisionTree);
    tree.dt.max_depth = 75;

    const auto rf = train(forest, data, 42);
    const auto dt = train(tree, data, 42);
    CHECK(model_json(rf).at("payload").at("trees") == model_json(dt).at("payload").at("trees"));

    for (int i = 0; i < 60; ++i) {
        const auto q = sv({{0, u(rng)}, {1, u(rng)}, {2, u(rng)}});
        CHECK(rf.predict(q) == dt.predict(q));
    }
}

TEST_CASE("evaluation matches hand-computed precision and recall", "[classify]") {
    // k=1 on the exact training vectors turns the model into a lookup table,
    // which makes the predicted labels fully controllable.
    std::vector<LabeledCommit> train_set = {
        lc(Category::Functional, sv({{0, 1.0}})),
        lc(Category::Functional, sv({{1, 1.0}})),
        lc(Category::BugFix, sv({{2, 1.0}})),
        lc(Category::BugFix, sv({{3, 1.0}})),
    };
    Hyperparams p = Hyperparams::defaults(ModelKind::KNearest);
    p.knn.n_neighbors = 1;
    const auto model = train(p, train_set, 42);

    const std::vector<LabeledCommit> test_set = {
        lc(Category::Functional, sv({{0, 1.0}})), // predicted Functional: hit
        lc(Category::BugFix, sv({{1, 1.0}})),     // predicted Functional: miss
        lc(Category::BugFix, sv({{2, 1.0}})),     // predicted BugFix: hit
        lc(Category::InternalQA, sv({{3, 1.0}})), // predicted BugFix: miss
    };
    const auto report = evaluate(model, test_set);

    const auto f = report.per_category.at(Category::Functional);
    CHECK(f.precision == Catch::Approx(0.5).margin(1e-12));
    CHECK(f.recall == Catch::Approx(1.0).margin(1e-12));
    CHECK(f.f1 == Catch::Approx(2.0 / 3.0).margin(1e-12));

    const auto b = report.per_category.at(Category::BugFix);
    CHECK(b.precision == Catch::Approx(0.5).margin(1e-12));
    CHECK(b.recall == Catch::Approx(0.5).margin(1e-12));
    CHECK(b.f1 == Catch::Approx(0.5).margin(1e-12));

    // No InternalQA predictions and no InternalQA hits: everything is zero.
    const auto i = report.per_category.at(Category::InternalQA);
    CHECK(i.precision == 0.0);
    CHECK(i.recall == 0.0);
    CHECK(i.f1 == 0.0);

    CHECK(report.micro_f1 == Catch::Approx(0.5).margin(1e-12));
    CHECK(report.confusion[0][0] == 1);
    CHECK(report.confusion[1][0] == 1);
    CHECK(report.confusion[1][1] == 1);
    CHECK(report.confusion[2][1] == 1);
}

TEST_CASE("micro-F1 equals accuracy on random label assignments", "[classify]") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> y_dist(0, 4);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<LabeledCommit> train_set, test_set;
        const int n = 20;
        for (int i = 0; i < n; ++i) {
            const auto vec = sv({{static_cast<std::size_t>(i), 1.0}});
            train_set.push_back(lc(static_cast<Category>(y_dist(rng)), vec));
            test_set.push_back(lc(static_cast<Category>(y_dist(rng)), vec));
        }
        Hyperparams p = Hyperparams::defaults(ModelKind::KNearest);
        p.knn.n_neighbors = 1;
        const auto model = train(p, train_set, 1);
        const auto report = evaluate(model, test_set);

        std::size_t correct = 0;
        for (const auto& item : test_set) {
            if (model.predict(item.vector) == item.label) {
                ++correct;
            }
        }
        const double accuracy = static_cast<double>(correct) / n;
        CHECK(std::abs(report.micro_f1 - accuracy) <= 1e-12);
    }
}

TEST_CASE("stratified split follows the quota arithmetic", "[classify]") {
    SECTION("two balanced categories") {
        std::vector<LabeledCommit> data;
        for (int i = 0; i < 4; ++i) {
            data.push_back(lc(Category::Functional, {}, "f" + std::to_string(i)));
        }
        for (int i = 0; i < 4; ++i) {
            data.push_back(lc(Category::BugFix, {}, "b" + std::to_string(i)));
        }
        const auto [train_half, test_half] = stratified_split(data, 0.25, 42);
        REQUIRE(test_half.size() == 2);
        REQUIRE(train_half.size() == 6);
        std::array<int, kCategoryCount> counts{};
        for (const auto& item : test_half) {
            ++counts[static_cast<std::size_t>(item.label)];
        }
        CHECK(counts[0] == 1);
        CHECK(counts[1] == 1);

        // Union is the whole set and halves are disjoint.
        std::set<std::string> seen;
        for (const auto& item : train_half) {
            seen.insert(item.commit.sha);
        }
        for (const auto& item : test_half) {
            CHECK(seen.insert(item.commit.sha).second);
        }
        CHECK(seen.size() == data.size());
    }

    SECTION("largest remainder resolves the uneven category") {
        std::vector<LabeledCommit> data;
        const std::array<std::size_t, kCategoryCount> sizes = {348, 348, 348, 348, 310};
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
            for (std::size_t i = 0; i < sizes[c]; ++i) {
                data.push_back(lc(static_cast<Category>(c), {},
                                  std::to_string(c) + "_" + std::to_string(i)));
            }
        }
        const auto [train_half, test_half] = stratified_split(data, 0.25, 42);
        CHECK(train_half.size() == 1276);
        REQUIRE(test_half.size() == 426);
        std::array<std::size_t, kCategoryCount> counts{};
        for (const auto& item : test_half) {
            ++counts[static_cast<std::size_t>(item.label)];
        }
        CHECK(counts == std::array<std::size_t, kCategoryCount>{87, 87, 87, 87, 78});
    }

    SECTION("same seed, same partition; output keeps the input order") {
        std::vector<LabeledCommit> data;
        for (int i = 0; i < 30; ++i) {
            data.push_back(lc(static_cast<Category>(i % 3), {}, std::to_string(i)));
        }
        const auto a = stratified_split(data, 0.3, 9);
        const auto b = stratified_split(data, 0.3, 9);
        REQUIRE(a.first.size() == b.first.size());
        for (std::size_t i = 0; i < a.first.size(); ++i) {
            CHECK(a.first[i].commit.sha == b.first[i].commit.sha);
        }

        // Both halves preserve original relative order.
        for (const auto& half : {a.first, a.second}) {
            int last = -1;
            for (const auto& item : half) {
                const int pos = std::stoi(item.commit.sha);
                CHECK(pos > last);
                last = pos;
            }
        }
    }

    SECTION("remainder ties go to the canonical-first category") {
        std::vector<LabeledCommit> data = {
            lc(Category::Functional, {}, "f0"),
            lc(Category::Functional, {}, "f1"),
            lc(Category::BugFix, {}, "b0"),
            lc(Category::BugFix, {}, "b1"),
        };
        const auto [train_half, test_half] = stratified_split(data, 0.25, 5);
        REQUIRE(test_half.size() == 1);
        CHECK(test_half[0].label == Category::Functional);
    }

    SECTION("a present category needs at least two members") {
        std::vector<LabeledCommit> data = {
            lc(Category::Functional, {}, "f0"),
            lc(Category::Functional, {}, "f1"),
            lc(Category::BugFix, {}, "b0"),
        };
        CHECK_THROWS_AS(stratified_split(data, 0.25, 1), TooFewPerCategory);
    }
}

namespace {

std::vector<LabeledCommit> quadrant_data() {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::vector<LabeledCommit> data;
    const std::array<std::pair<double, double>, 4> corners = {
        {{0.1, 0.1}, {0.1, 0.9}, {0.9, 0.1}, {0.9, 0.9}}};
    for (std::size_t c = 0; c < corners.size(); ++c) {
        for (int i = 0; i < 10; ++i) {
            data.push_back(lc(static_cast<Category>(c),
                              sv({{0, corners[c].first + jitter(rng)},
                                  {1, corners[c].second + jitter(rng)}})));
        }
    }
    return data;
}

} // namespace

TEST_CASE("grid search picks the first point that separates the data", "[classify]") {
    const auto data = quadrant_data();

    Hyperparams shallow = Hyperparams::defaults(ModelKind::DecisionTree);
    shallow.dt.max_depth = 1; // one split cannot carve four quadrants
    Hyperparams deep = Hyperparams::defaults(ModelKind::DecisionTree);
    deep.dt.max_depth = 3;
    Hyperparams deeper = Hyperparams::defaults(ModelKind::DecisionTree);
    deeper.dt.max_depth = 4;

    const auto [best, score] = grid_search_cv({shallow, deep, deeper}, data, 4, 42);
    CHECK(best.dt.max_depth == 3); // ties with depth 4 resolve to the earlier entry
    CHECK(score == Catch::Approx(1.0).margin(1e-12));

    const auto [only, only_score] = grid_search_cv({shallow}, data, 4, 42);
    CHECK(only.dt.max_depth == 1);
    CHECK(only_score < 0.8);
}

TEST_CASE("grid search rejects folds larger than a category", "[classify]") {
    const auto data = quadrant_data(); // 10 per category
    CHECK_THROWS_AS(grid_search_cv({Hyperparams::defaults(ModelKind::MultinomialNB)}, data, 11, 1),
                    FoldTooSmall);
}

TEST_CASE("training twice with one seed serializes identically", "[classify]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> y_dist(0, 4);
    std::vector<LabeledCommit> data;
    for (int i = 0; i < 30; ++i) {
        data.push_back(lc(static_cast<Category>(y_dist(rng)),
                          sv({{0, u(rng)}, {1, u(rng)}, {2, u(rng)}, {3, u(rng)}})));
    }

    for (const ModelKind kind :
         {ModelKind::RandomForest, ModelKind::DecisionTree, ModelKind::LogisticRegression,
          ModelKind::MultinomialNB, ModelKind::KNearest}) {
        Hyperparams p = Hyperparams::defaults(kind);
        p.rf.n_estimators = 5;
        p.rf.max_depth = 6;
        p.knn.n_neighbors = 3;
        const auto first = train(p, data, 97).to_json();
        const auto second = train(p, data, 97).to_json();
        CHECK(first == second);
    }
}

TEST_CASE("models round-trip through JSON and disk byte-identically", "[classify]") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> y_dist(0, 4);
    std::vector<LabeledCommit> data;
    for (int i = 0; i < 30; ++i) {
        data.push_back(lc(static_cast<Category>(y_dist(rng)),
                          sv({{0, u(rng)}, {1, u(rng)}, {2, u(rng)}, {3, u(rng)}})));
    }

    for (const ModelKind kind :
         {ModelKind::RandomForest, ModelKind::DecisionTree, ModelKind::LogisticRegression,
          ModelKind::MultinomialNB, ModelKind::KNearest}) {
        Hyperparams p = Hyperparams::defaults(kind);
        p.rf.n_estimators = 5;
        p.rf.max_depth = 6;
        p.knn.n_neighbors = 3;
        const auto model = train(p, data, 123);
        const std::string text = model.to_json();
        const auto restored = TrainedModel::from_json(text);
        CHECK(restored.to_json() == text);
        CHECK(restored.kind() == kind);
        CHECK(restored.seed() == 123);

        for (int i = 0; i < 20; ++i) {
            const auto q = sv({{0, u(rng)}, {1, u(rng)}, {2, u(rng)}, {3, u(rng)}});
            CHECK(restored.predict(q) == model.predict(q));
        }

        const auto path = temp_file("refdoc_model_" +
                                    std::string(model_kind_name(kind)) + ".json");
        model.save(path.string());
        const auto loaded = TrainedModel::load(path.string());
        CHECK(loaded.to_json() == text);
        std::filesystem::remove(path);
    }
}

TEST_CASE("model JSON parsing rejects malformed input", "[classify]") {
    CHECK_THROWS_AS(TrainedModel::from_json("not json"), MalformedJson);
    CHECK_THROWS_AS(TrainedModel::from_json(R"({"kind":"svm","params":{},"seed":0,"payload":{}})"),
                    MalformedJson);
    CHECK_THROWS_AS(TrainedModel::from_json(R"({"kind":"dt","seed":0})"), MalformedJson);
    CHECK_THROWS_AS(TrainedModel::load("/nonexistent/refdoc/model.json"), IoError);
}

TEST_CASE("naive Bayes argmax survives uniform scaling of the queries", "[classify]") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::uniform_int_distribution<std::size_t> f_dist(0, 5);
    std::vector<LabeledCommit> data;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        for (int i = 0; i < 10; ++i) { // balanced classes give uniform priors
            SparseVector v;
            for (int e = 0; e < 3; ++e) {
                v.entries[f_dist(rng)] = u(rng);
            }
            data.push_back(lc(static_cast<Category>(c), std::move(v)));
        }
    }
    const auto model = train(Hyperparams::defaults(ModelKind::MultinomialNB), data, 3);

    for (int i = 0; i < 50; ++i) {
        SparseVector q;
        for (int e = 0; e < 4; ++e) {
            q.entries[f_dist(rng)] = u(rng);
        }
        const Category base = model.predict(q);
        for (const double lambda : {0.25, 3.0, 17.0}) {
            SparseVector scaled = q;
            for (auto& [f, w] : scaled.entries) {
                w *= lambda;
            }
            CHECK(model.predict(scaled) == base);
        }
    }
}

TEST_CASE("logistic regression separates axis-aligned classes", "[classify]") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> jitter(0.0, 0.2);
    std::vector<LabeledCommit> data;
    for (std::size_t c = 0; c < 3; ++c) {
        for (int i = 0; i < 10; ++i) {
            data.push_back(
                lc(static_cast<Category>(c), sv({{c, 1.0}, {3, jitter(rng)}})));
        }
    }
    const auto model = train(Hyperparams::defaults(ModelKind::LogisticRegression), data, 42);
    for (const auto& item : data) {
        CHECK(model.predict(item.vector) == item.label);
    }
}

TEST_CASE("hyperparameter validation", "[classify]") {
    const std::vector<LabeledCommit> data = {
        lc(Category::Functional, sv({{0, 1.0}})),
        lc(Category::BugFix, sv({{1, 1.0}})),
    };
    CHECK_THROWS_AS(train(Hyperparams::defaults(ModelKind::DecisionTree), {}, 1),
                    EmptyTrainingSet);

    Hyperparams p = Hyperparams::defaults(ModelKind::DecisionTree);
    p.dt.criterion = "entropy";
    CHECK_THROWS_AS(train(p, data, 1), Error);

    p = Hyperparams::defaults(ModelKind::LogisticRegression);
    p.lr.penalty = "l2";
    CHECK_THROWS_AS(train(p, data, 1), Error);

    p = Hyperparams::defaults(ModelKind::KNearest);
    p.knn.weights = "distance";
    CHECK_THROWS_AS(train(p, data, 1), Error);

    p = Hyperparams::defaults(ModelKind::MultinomialNB);
    p.mnb.alpha = 0.0;
    CHECK_THROWS_AS(train(p, data, 1), Error);
}

TEST_CASE("model kind names round-trip", "[classify]") {
    for (const ModelKind kind :
         {ModelKind::RandomForest, ModelKind::DecisionTree, ModelKind::LogisticRegression,
          ModelKind::MultinomialNB, ModelKind::KNearest}) {
        const auto parsed = parse_model_kind(model_kind_name(kind));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == kind);
    }
    CHECK_FALSE(parse_model_kind("svm").has_value());
    CHECK_FALSE(parse_model_kind("").has_value());
}

TEST_CASE("labeled CSV round-trips awkward content", "[classify]") {
    std::vector<LabeledCommit> data;
    data.push_back(lc(Category::BugFix, {}, "a1b2"));
    data.back().commit.project_id = "apache/commons";
    data.back().commit.message = "Fix NPE, finally";
    data.push_back(lc(Category::CodeSmell, {}, "c3d4"));
    data.back().commit.project_id = "team,with,commas";
    data.back().commit.message = "Remove \"dead\" code\nacross two lines";
    data.push_back(lc(Category::Functional, {}, "e5f6"));
    data.back().commit.project_id = "p";
    data.back().commit.message = "";

    const auto path = temp_file("refdoc_labeled.csv");
    save_labeled_csv(data, path.string());
    const auto loaded = load_labeled_csv(path.string());
    std::filesystem::remove(path);

    REQUIRE(loaded.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(loaded[i].commit.sha == data[i].commit.sha);
        CHECK(loaded[i].commit.project_id == data[i].commit.project_id);
        CHECK(loaded[i].commit.message == data[i].commit.message);
        CHECK(loaded[i].label == data[i].label);
    }
}

TEST_CASE("labeled CSV rejects bad input", "[classify]") {
    CHECK_THROWS_AS(load_labeled_csv("/nonexistent/refdoc/data.csv"), IoError);

    const auto bad_label = temp_file("refdoc_bad_label.csv");
    {
        std::ofstream out(bad_label);
        out << "sha,project_id,message,label\nabc,p,msg,Mystery\n";
    }
    CHECK_THROWS_AS(load_labeled_csv(bad_label.string()), IoError);
    std::filesystem::remove(bad_label);

    const auto bad_shape = temp_file("refdoc_bad_shape.csv");
    {
        std::ofstream out(bad_shape);
        out << "sha,project_id,message,label\nabc,p,msg\n";
    }
    CHECK_THROWS_AS(load_labeled_csv(bad_shape.string()), IoError);
    std::filesystem::remove(bad_shape);
}

TEST_CASE("top features rank category evidence", "[classify]") {
    const auto doc = [](std::vector<std::string> words) {
        NormalizedMessage m;
        m.lemmas = words;
        m.sentences = {std::move(words)};
        return m;
    };
    const std::vector<NormalizedMessage> docs = {
        doc({"duplicate", "code"}),
        doc({"duplicate", "smell"}),
        doc({"feature", "menu"}),
    };
    NgramConfig config;
    config.max_n = 1;
    config.max_features = 0;
    const auto tfidf = fit_tfidf(docs, config);
    REQUIRE(tfidf.vocabulary.size() == 5);

    const auto vectors = transform_all(tfidf, docs);
    std::vector<LabeledCommit> data = {
        lc(Category::CodeSmell, vectors[0]),
        lc(Category::CodeSmell, vectors[1]),
        lc(Category::Functional, vectors[2]),
    };
    Hyperparams p = Hyperparams::defaults(ModelKind::MultinomialNB);
    p.mnb.alpha = 1.0;
    const auto nb = train(p, data, 42);

    const auto smell_top = top_features(tfidf, nb, Category::CodeSmell, 1);
    REQUIRE(smell_top.size() == 1);
    CHECK(smell_top[0] == "duplicate");

    // "feature" and "menu" carry identical weight; lexicographic order breaks
    // the tie.
    const auto func_top = top_features(tfidf, nb, Category::Functional, 2);
    REQUIRE(func_top.size() == 2);
    CHECK(func_top[0] == "feature");
    CHECK(func_top[1] == "menu");

    // k beyond the vocabulary clamps.
    CHECK(top_features(tfidf, nb, Category::BugFix, 100).size() == 5);

    // Tree importances do not depend on the category argument.
    const auto dt = train(Hyperparams::defaults(ModelKind::DecisionTree), data, 42);
    CHECK(top_features(tfidf, dt, Category::Functional, 3) ==
          top_features(tfidf, dt, Category::CodeSmell, 3));

    Hyperparams kp = Hyperparams::defaults(ModelKind::KNearest);
    kp.knn.n_neighbors = 1;
    const auto knn = train(kp, data, 42);
    CHECK_THROWS_AS(top_features(tfidf, knn, Category::Functional, 1), UnsupportedModel);
}

TEST_CASE("all classifiers learn the synthetic corpus", "[classify][pipeline]") {
    const auto corpus = testsupport::make_synthetic_corpus(200, 42);
    REQUIRE(corpus.size() == 1000);

    auto [train_set, test_set] = stratified_split(corpus, 0.25, 42);
    REQUIRE(train_set.size() == 750);
    REQUIRE(test_set.size() == 250);

    const auto normalizer = Normalizer::from_data_dir(REFDOC_DATA_DIR);
    std::vector<NormalizedMessage> train_docs;
    train_docs.reserve(train_set.size());
    for (const auto& item : train_set) {
        train_docs.push_back(normalizer(item.commit.message));
    }
    const auto tfidf = fit_tfidf(train_docs, NgramConfig{});
    for (std::size_t i = 0; i < train_set.size(); ++i) {
        train_set[i].vector = transform(tfidf, train_docs[i]);
    }
    for (auto& item : test_set) {
        item.vector = transform(tfidf, normalizer(item.commit.message));
    }

    const auto score_of = [&](Hyperparams p) {
        const auto model = train(p, train_set, 42);
        return evaluate(model, test_set).micro_f1;
    };

    Hyperparams rf = Hyperparams::defaults(ModelKind::RandomForest);
    rf.rf.n_estimators = 100; // plenty for a keyword-separable corpus
    const double rf_score = score_of(rf);
    const double dt_score = score_of(Hyperparams::defaults(ModelKind::DecisionTree));
    const double lr_score = score_of(Hyperparams::defaults(ModelKind::LogisticRegression));
    const double mnb_score = score_of(Hyperparams::defaults(ModelKind::MultinomialNB));
    const double knn_score = score_of(Hyperparams::defaults(ModelKind::KNearest));

    CHECK(rf_score >= 0.90);
    CHECK(dt_score >= 0.90);
    CHECK(lr_score >= 0.90);
    CHECK(mnb_score >= 0.90);
    CHECK(rf_score >= knn_score);
}

TEST_CASE("paired comparison of identical models is a null result", "[classify]") {
    const auto data = quadrant_data();
    Hyperparams p = Hyperparams::defaults(ModelKind::KNearest);
    p.knn.n_neighbors = 3;
    const auto a = train(p, data, 42);
    const auto b = train(p, data, 42);
    const auto result = mcnemar(a, b, data);
    CHECK(result.p_value == 1.0);
}
