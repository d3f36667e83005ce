// refdoc: mine refactoring commits, train/apply message classifiers, scan
// messages against the self-affirmed-refactoring catalog, and render reports.
//
// Every flag can also be supplied through a key=value config file
// ([subcommand] sections); command-line flags win. REFDOC_SEED overrides the
// default seed for every seeded subcommand.

#include <CLI11.hpp>
#include <json.hpp>

#include <refdoc/categories.hpp>
#include <refdoc/classify.hpp>
#include <refdoc/corpus.hpp>
#include <refdoc/errors.hpp>
#include <refdoc/features.hpp>
#include <refdoc/report.hpp>
#include <refdoc/sarpatterns.hpp>
#include <refdoc/stats.hpp>
#include <refdoc/testdetect.hpp>
#include <refdoc/textprep.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace refdoc;

namespace {

std::string data_path(const char* name) {
    return std::string(REFDOC_DATA_DIR) + "/" + name;
}

std::uint64_t env_default_seed() {
    const char* raw = std::getenv("REFDOC_SEED");
    if (raw == nullptr || *raw == '\0') { return 42; }
    char* end = nullptr;
    const unsigned long long value = std::strtoull(raw, &end, 10);
    if (end == nullptr || *end != '\0') { return 42; }
    return static_cast<std::uint64_t>(value);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw IoError("cannot open " + path); }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

std::string project_id_from(std::string path) {
    while (path.size() > 1 && (path.back() == '/' || path.back() == '\\')) { path.pop_back(); }
    const auto slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (base.size() > 4 && base.compare(base.size() - 4, 4, ".git") == 0) {
        base.resize(base.size() - 4);
    }
    return base;
}

// ---------------------------------------------------------------- mine ----

struct MineOptions {
    std::vector<std::string> repos;
    std::string refminer_dir;
    std::string out_dir = ".";
    std::string branch;
    std::string kinds_path = data_path("refactoring_kinds.tsv");
    std::size_t sample = 0;
    std::uint64_t seed = env_default_seed();
};

void run_mine(const MineOptions& opt) {
    const KindCatalog kinds = load_kind_catalog(opt.kinds_path);

    std::vector<ProjectRef> projects;
    std::vector<CommitRecord> commits;
    std::map<std::string, std::vector<RefactoringOperation>> ops;

    for (const std::string& repo : opt.repos) {
        ProjectRef ref{project_id_from(repo), repo, opt.branch};
        std::vector<CommitRecord> ingested = ingest_repository(ref);
        std::cerr << ref.project_id << ": " << ingested.size() << " commits\n";
        commits.insert(commits.end(), ingested.begin(), ingested.end());
        projects.push_back(std::move(ref));
    }

    if (!opt.refminer_dir.empty()) {
        for (const ProjectRef& ref : projects) {
            const std::string dump = opt.refminer_dir + "/" + ref.project_id + ".json";
            if (!fs::exists(dump)) {
                std::cerr << "warning: no refactoring dump for " << ref.project_id
                          << " (" << dump << ")\n";
                continue;
            }
            for (auto& [sha, found] : parse_refminer_json(slurp(dump), kinds)) {
                auto& dst = ops[sha];
                dst.insert(dst.end(), found.begin(), found.end());
            }
        }
    }

    const JoinResult joined = join_refactorings(commits, ops);
    if (!joined.orphans.empty()) {
        std::cerr << "warning: " << joined.orphans.size()
                  << " refactoring commit(s) missing from the commit stream\n";
        json orphans = json::object();
        for (const auto& [sha, lost] : joined.orphans) {
            json kinds_list = json::array();
            for (const RefactoringOperation& op : lost) { kinds_list.push_back(op.kind); }
            orphans[sha] = kinds_list;
        }
        write_text_file(opt.out_dir + "/orphans.json", orphans.dump(2) + "\n");
    }

    fs::create_directories(opt.out_dir);
    write_commits_ndjson(commits, opt.out_dir + "/commits.ndjson");
    write_refcommits_ndjson(joined.refcommits, opt.out_dir + "/refcommits.ndjson");
    const std::string stats = corpus_stats_to_json(
        compute_corpus_stats(projects, commits, joined.refcommits));
    write_text_file(opt.out_dir + "/corpus_stats.json", stats);

    if (opt.sample > 0) {
        write_commits_ndjson(sample_nonrefactoring(commits, joined.refcommits, opt.seed, opt.sample),
                             opt.out_dir + "/nonref_sample.ndjson");
    }

    std::cout << stats;
}

// --------------------------------------------------------------- train ----

struct TrainOptions {
    std::string data_csv;
    std::string model_kind = "rf";
    std::string grid_path;
    std::string out_path = "model.json";
    std::string data_dir = REFDOC_DATA_DIR;
    double test_fraction = 0.25;
    std::size_t folds = 10;
    std::size_t min_n = 1;
    std::size_t max_n = 2;
    std::size_t max_features = 5000;
    std::uint64_t seed = env_default_seed();
};

void apply_grid_entry(Hyperparams& p, const std::string& key, const std::string& value) {
    const auto as_size = [&] {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) { throw Error("bad grid value for " + key + ": " + value); }
        return static_cast<std::size_t>(v);
    };
    const auto as_double = [&] {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) { throw Error("bad grid value for " + key + ": " + value); }
        return v;
    };

    if (key == "max_depth") {
        p.rf.max_depth = p.dt.max_depth = as_size();
    } else if (key == "n_estimators") {
        p.rf.n_estimators = as_size();
    } else if (key == "criterion") {
        p.rf.criterion = p.dt.criterion = value;
    } else if (key == "bootstrap") {
        if (value != "true" && value != "false") {
            throw Error("bad grid value for bootstrap: " + value);
        }
        p.rf.bootstrap = value == "true";
    } else if (key == "feature_sampling") {
        if (value == "sqrt") {
            p.rf.feature_sampling = FeatureSampling::Sqrt;
        } else if (value == "all") {
            p.rf.feature_sampling = FeatureSampling::All;
        } else {
            throw Error("bad grid value for feature_sampling: " + value);
        }
    } else if (key == "c") {
        p.lr.c = as_double();
    } else if (key == "penalty") {
        p.lr.penalty = value;
    } else if (key == "alpha") {
        p.mnb.alpha = as_double();
    } else if (key == "n_neighbors") {
        p.knn.n_neighbors = as_size();
    } else if (key == "weights") {
        p.knn.weights = value;
    } else {
        throw Error("unknown grid key: " + key);
    }
}

// One grid candidate per non-comment line: whitespace-separated key=value
// pairs layered over the model defaults. No usable line means "defaults only".
std::vector<Hyperparams> load_grid(ModelKind kind, const std::string& path) {
    std::vector<Hyperparams> grid;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) { throw IoError("cannot open " + path); }
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') { line.pop_back(); }
            if (line.empty() || line[0] == '#') { continue; }
            Hyperparams p = Hyperparams::defaults(kind);
            std::istringstream tokens(line);
            std::string token;
            while (tokens >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw Error("grid entries are key=value pairs, got: " + token);
                }
                apply_grid_entry(p, token.substr(0, eq), token.substr(eq + 1));
            }
            grid.push_back(p);
        }
    }
    if (grid.empty()) { grid.push_back(Hyperparams::defaults(kind)); }
    return grid;
}

json hyperparams_to_json(const Hyperparams& p) {
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
    return json::object();
}

json eval_to_json(const EvalReport& rep) {
    json per = json::object();
    for (const auto& [cat, scores] : rep.per_category) {
        per[std::string(category_name(cat))] = {{"precision", scores.precision},
                                                {"recall", scores.recall},
                                                {"f1", scores.f1}};
    }
    json labels = json::array();
    json confusion = json::array();
    for (const Category actual : kAllCategories) {
        labels.push_back(std::string(category_name(actual)));
        json row = json::array();
        for (const Category predicted : kAllCategories) {
            row.push_back(rep.confusion[static_cast<std::size_t>(actual)]
                                       [static_cast<std::size_t>(predicted)]);
        }
        confusion.push_back(row);
    }
    return {{"micro_f1", rep.micro_f1},
            {"per_category", per},
            {"labels", labels},
            {"confusion", confusion}};
}

void vectorize(const Normalizer& norm, const TfidfModel& tfidf,
               std::vector<LabeledCommit>& rows) {
    for (LabeledCommit& row : rows) { row.vector = transform(tfidf, norm(row.commit.message)); }
}

void run_train(const TrainOptions& opt) {
    const auto kind = parse_model_kind(opt.model_kind);
    if (!kind) { throw Error("unknown model kind: " + opt.model_kind); }

    const std::vector<LabeledCommit> rows = load_labeled_csv(opt.data_csv);
    std::vector<LabeledCommit> train_rows;
    std::vector<LabeledCommit> test_rows;
    if (opt.test_fraction > 0.0) {
        std::tie(train_rows, test_rows) = stratified_split(rows, opt.test_fraction, opt.seed);
    } else {
        train_rows = rows;
    }

    const Normalizer norm = Normalizer::from_data_dir(opt.data_dir);
    std::vector<NormalizedMessage> train_msgs;
    train_msgs.reserve(train_rows.size());
    for (const LabeledCommit& row : train_rows) { train_msgs.push_back(norm(row.commit.message)); }

    const NgramConfig cfg{opt.min_n, opt.max_n, opt.max_features};
    const TfidfModel tfidf = fit_tfidf(train_msgs, cfg);
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        train_rows[i].vector = transform(tfidf, train_msgs[i]);
    }
    vectorize(norm, tfidf, test_rows);

    const std::vector<Hyperparams> grid = load_grid(*kind, opt.grid_path);
    Hyperparams best = grid.front();
    std::optional<double> cv_score;
    if (grid.size() > 1) {
        double score = 0.0;
        std::tie(best, score) = grid_search_cv(grid, train_rows, opt.folds, opt.seed);
        cv_score = score;
    }

    const TrainedModel model = train(best, train_rows, opt.seed);

    json bundle = {{"version", 1},
                   {"tfidf", json::parse(tfidf_to_json(tfidf))},
                   {"classifier", json::parse(model.to_json())}};
    write_text_file(opt.out_path, bundle.dump(2) + "\n");

    json summary = {{"model", opt.model_kind},
                    {"seed", opt.seed},
                    {"train_size", train_rows.size()},
                    {"test_size", test_rows.size()},
                    {"vocabulary_size", tfidf.vocabulary.size()},
                    {"params", hyperparams_to_json(best)},
                    {"cv_micro_f1", cv_score ? json(*cv_score) : json(nullptr)},
                    {"out", opt.out_path}};
    if (!test_rows.empty()) { summary["evaluation"] = eval_to_json(evaluate(model, test_rows)); }
    emit(summary);
}

// ------------------------------------------------------------ classify ----

struct ClassifyOptions {
    std::string model_path;
    std::string commits_path;
    std::string out_path = "labeled.csv";
    std::string data_dir = REFDOC_DATA_DIR;
};

void run_classify(const ClassifyOptions& opt) {
    json bundle = json::parse(slurp(opt.model_path), nullptr, false);
    if (bundle.is_discarded() || !bundle.is_object() || bundle.value("version", 0) != 1 ||
        !bundle.contains("tfidf") || !bundle.contains("classifier")) {
        throw Error("not a model bundle: " + opt.model_path);
    }
    const TfidfModel tfidf = tfidf_from_json(bundle["tfidf"].dump());
    const TrainedModel model = TrainedModel::from_json(bundle["classifier"].dump());
    const Normalizer norm = Normalizer::from_data_dir(opt.data_dir);

    std::vector<LabeledCommit> labeled;
    std::map<std::string, std::size_t> by_category;
    for (CommitRecord& commit : read_commits_ndjson(opt.commits_path)) {
        LabeledCommit row;
        row.vector = transform(tfidf, norm(commit.message));
        row.label = model.predict(row.vector);
        row.commit = std::move(commit);
        ++by_category[std::string(category_name(row.label))];
        labeled.push_back(std::move(row));
    }
    save_labeled_csv(labeled, opt.out_path);

    emit({{"commits", labeled.size()}, {"by_category", by_category}, {"out", opt.out_path}});
}

// ------------------------------------------------------------ sar-scan ----

struct SarScanOptions {
    std::string commits_path;
    std::string catalog_path = data_path("sar_catalog.tsv");
    std::string patterns = "all";
    std::string out_path; // empty writes to stdout
};

// The pattern set a subcommand scans with: the whole catalog, only the
// patterns flagged significant, or the bare "Refactor*" keyword baseline.
PatternCatalog select_patterns(const std::string& which, const std::string& catalog_path) {
    if (which == "refactor") {
        PatternCatalog keyword;
        keyword.version = "keyword-baseline";
        keyword.patterns.push_back(compile_pattern("Refactor*"));
        return keyword;
    }
    PatternCatalog catalog = load_pattern_catalog(catalog_path);
    if (which == "significant") {
        PatternCatalog kept;
        kept.version = catalog.version;
        for (SarPattern& p : catalog.patterns) {
            if (p.significant.value_or(false)) { kept.patterns.push_back(std::move(p)); }
        }
        return kept;
    }
    return catalog;
}

void run_sar_scan(const SarScanOptions& opt) {
    const PatternCatalog catalog = select_patterns(opt.patterns, opt.catalog_path);

    std::ofstream file;
    if (!opt.out_path.empty()) {
        file.open(opt.out_path, std::ios::binary);
        if (!file) { throw IoError("cannot open " + opt.out_path); }
    }
    std::ostream& out = opt.out_path.empty() ? std::cout : file;

    std::size_t matched = 0;
    std::size_t total = 0;
    for (const CommitRecord& commit : read_commits_ndjson(opt.commits_path)) {
        json matches = json::array();
        for (const std::size_t index : scan_message(commit.message, catalog)) {
            const SarPattern& p = catalog.patterns[index];
            matches.push_back({{"scope", std::string(pattern_scope_name(p.scope))},
                               {"template", p.text}});
        }
        matched += matches.empty() ? 0 : 1;
        ++total;
        out << json{{"sha", commit.sha},
                    {"project_id", commit.project_id},
                    {"matches", matches}}
                   .dump()
            << "\n";
    }
    std::cerr << "matched " << matched << " of " << total << " commits against "
              << catalog.patterns.size() << " pattern(s)\n";
}

// --------------------------------------------------------------- stats ----

struct McnemarOptions {
    std::size_t b = 0;
    std::size_t c = 0;
};

void run_stats_mcnemar(const McnemarOptions& opt) {
    const McNemarResult r = mcnemar_from_counts(opt.b, opt.c);
    emit({{"b", opt.b},
          {"c", opt.c},
          {"statistic", r.statistic},
          {"p_value", r.p_value},
          {"exact", r.exact}});
}

struct MwuOptions {
    std::string x_path;
    std::string y_path;
    std::string alternative = "two-sided";
    std::string method = "auto";
};

std::vector<double> read_numbers(const std::string& path) {
    std::ifstream in(path);
    if (!in) { throw IoError("cannot open " + path); }
    std::vector<double> values;
    double v = 0.0;
    while (in >> v) { values.push_back(v); }
    if (!in.eof()) { throw Error("non-numeric token in " + path); }
    return values;
}

void run_stats_mwu(const MwuOptions& opt) {
    const Alternative alt =
        opt.alternative == "greater" ? Alternative::greater : Alternative::two_sided;
    MethodChoice method = MethodChoice::automatic;
    if (opt.method == "exact") { method = MethodChoice::exact; }
    if (opt.method == "normal") { method = MethodChoice::normal; }

    const RankTestResult r = mann_whitney_u(read_numbers(opt.x_path), read_numbers(opt.y_path),
                                            alt, method);
    emit({{"u_statistic", r.u_statistic},
          {"p_value", r.p_value},
          {"alternative", r.alternative == Alternative::greater ? "greater" : "two-sided"},
          {"method", r.method == RankMethod::exact ? "exact" : "normal"}});
}

// -------------------------------------------------------------- report ----

struct ReportOptions {
    std::string out_dir;
    std::string format = "csv";
    // categories + prodtest
    std::string labels_csv;
    // prodtest + labelsplit
    std::string refcommits_path;
    // prodtest
    std::string filekinds_csv;
    std::string java_root;
    std::string attribution = "any";
    // labelsplit
    std::string catalog_path = data_path("sar_catalog.tsv");
    std::string patterns = "all";
};

void write_report(const ReportOptions& opt, const std::string& stem, const std::string& body) {
    fs::create_directories(opt.out_dir);
    const char* ext = opt.format == "plot" ? "svg" : opt.format.c_str();
    const std::string path = opt.out_dir + "/" + stem + "." + ext;
    write_text_file(path, body);
    std::cout << path << "\n";
}

void run_report_categories(const ReportOptions& opt) {
    const CategoryDistribution dist = category_distribution(load_labeled_csv(opt.labels_csv));
    if (opt.format == "csv") {
        write_report(opt, "categories", category_distribution_csv(dist));
    } else if (opt.format == "json") {
        write_report(opt, "categories", category_distribution_json(dist));
    } else {
        write_report(opt, "categories", category_distribution_svg(dist));
    }
}

// Two-field "path,kind" rows with RFC-4180 quoting on the path, as written
// by tools that walk a source tree. A literal "path,kind" header is skipped.
std::map<std::string, FileKind> parse_filekinds_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw IoError("cannot open " + path); }
    std::map<std::string, FileKind> kinds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') { line.pop_back(); }
        if (line.empty() || line == "path,kind") { continue; }

        std::string field;
        std::size_t i = 0;
        if (line[0] == '"') {
            for (i = 1; i < line.size(); ++i) {
                if (line[i] != '"') {
                    field += line[i];
                } else if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    ++i;
                    break;
                }
            }
        } else {
            i = line.find(',');
            if (i == std::string::npos) { i = line.size(); }
            field = line.substr(0, i);
        }
        if (i >= line.size() || line[i] != ',') {
            throw Error(path + ":" + std::to_string(lineno) + ": expected path,kind");
        }
        const std::string kind = line.substr(i + 1);
        if (kind == "production") {
            kinds[field] = FileKind::Production;
        } else if (kind == "test") {
            kinds[field] = FileKind::Test;
        } else if (kind == "unparseable") {
            kinds[field] = FileKind::Unparseable;
        } else {
            throw Error(path + ":" + std::to_string(lineno) + ": unknown file kind " + kind);
        }
    }
    return kinds;
}

std::map<std::string, FileKind> scan_java_tree(const std::string& root) {
    std::map<std::string, FileKind> kinds;
    for (const fs::directory_entry& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".java") { continue; }
        const std::string rel = fs::relative(entry.path(), root).generic_string();
        kinds[rel] = classify_file(rel, slurp(entry.path().string()));
    }
    return kinds;
}

void run_report_prodtest(const ReportOptions& opt) {
    if (opt.format == "plot") {
        throw Error("the production/test matrix has no plot rendering; use csv or json");
    }
    if (opt.filekinds_csv.empty() == opt.java_root.empty()) {
        throw Error("pass exactly one of --filekinds and --java-root");
    }

    std::map<std::string, Category> labels;
    for (const LabeledCommit& row : load_labeled_csv(opt.labels_csv)) {
        labels[row.commit.sha] = row.label;
    }
    const std::map<std::string, FileKind> kinds = opt.java_root.empty()
                                                      ? parse_filekinds_csv(opt.filekinds_csv)
                                                      : scan_java_tree(opt.java_root);
    const PathAttribution attribution = opt.attribution == "majority"
                                            ? PathAttribution::MajorityTest
                                            : PathAttribution::AnyTest;

    const ProdTestMatrix matrix = prod_test_matrix(read_refcommits_ndjson(opt.refcommits_path),
                                                   labels, kinds, attribution);
    write_report(opt, "prodtest",
                 opt.format == "csv" ? prod_test_matrix_csv(matrix) : prod_test_matrix_json(matrix));
}

void run_report_labelsplit(const ReportOptions& opt) {
    const PatternCatalog catalog = select_patterns(opt.patterns, opt.catalog_path);
    const std::map<std::string, LabelSplit> split =
        label_split(read_refcommits_ndjson(opt.refcommits_path), catalog.patterns);
    if (opt.format == "csv") {
        write_report(opt, "labelsplit", label_split_csv(split));
    } else if (opt.format == "json") {
        write_report(opt, "labelsplit", label_split_json(split));
    } else {
        write_report(opt, "labelsplit", label_split_svg(split));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Refactoring-commit mining and classification toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file mirroring the flags; flags win");

    MineOptions mine_opt;
    CLI::App* mine = app.add_subcommand("mine", "Walk git repositories and join refactoring dumps");
    mine->add_option("repos", mine_opt.repos, "Repository paths")->required();
    mine->add_option("--refminer-json", mine_opt.refminer_dir,
                     "Directory holding <project>.json refactoring dumps");
    mine->add_option("--out", mine_opt.out_dir, "Output directory")->capture_default_str();
    mine->add_option("--branch", mine_opt.branch, "Branch to walk (default: repository HEAD)");
    mine->add_option("--kinds", mine_opt.kinds_path, "Refactoring kind catalog")
        ->capture_default_str();
    mine->add_option("--sample", mine_opt.sample,
                     "Also draw this many matched non-refactoring commits");
    mine->add_option("--seed", mine_opt.seed, "Sampling seed")->capture_default_str();
    mine->callback([&] { run_mine(mine_opt); });

    TrainOptions train_opt;
    CLI::App* train = app.add_subcommand("train", "Fit a commit-message classifier");
    train->add_option("--data", train_opt.data_csv, "Labeled commits CSV")->required();
    train->add_option("--model", train_opt.model_kind, "Model kind")
        ->check(CLI::IsMember({"rf", "dt", "lr", "mnb", "knn"}))
        ->capture_default_str();
    train->add_option("--grid", train_opt.grid_path,
                      "Grid file: one candidate per line as key=value pairs");
    train->add_option("--out", train_opt.out_path, "Bundle output path")->capture_default_str();
    train->add_option("--data-dir", train_opt.data_dir, "Normalization table directory")
        ->capture_default_str();
    train->add_option("--test-fraction", train_opt.test_fraction,
                      "Held-out fraction (0 trains on everything)")
        ->capture_default_str();
    train->add_option("--folds", train_opt.folds, "Cross-validation folds")->capture_default_str();
    train->add_option("--min-n", train_opt.min_n, "Smallest n-gram")->capture_default_str();
    train->add_option("--max-n", train_opt.max_n, "Largest n-gram")->capture_default_str();
    train->add_option("--max-features", train_opt.max_features, "Vocabulary cap (0 = unlimited)")
        ->capture_default_str();
    train->add_option("--seed", train_opt.seed, "Split/training seed")->capture_default_str();
    train->callback([&] { run_train(train_opt); });

    ClassifyOptions classify_opt;
    CLI::App* classify = app.add_subcommand("classify", "Label commits with a trained bundle");
    classify->add_option("--model", classify_opt.model_path, "Bundle from `train`")->required();
    classify->add_option("--commits", classify_opt.commits_path, "Commits NDJSON")->required();
    classify->add_option("--out", classify_opt.out_path, "Labeled CSV output")
        ->capture_default_str();
    classify->add_option("--data-dir", classify_opt.data_dir, "Normalization table directory")
        ->capture_default_str();
    classify->callback([&] { run_classify(classify_opt); });

    SarScanOptions sar_opt;
    CLI::App* sar = app.add_subcommand("sar-scan",
                                       "Match commit messages against the pattern catalog");
    sar->add_option("--commits", sar_opt.commits_path, "Commits NDJSON")->required();
    sar->add_option("--catalog", sar_opt.catalog_path, "Pattern catalog")->capture_default_str();
    sar->add_option("--patterns", sar_opt.patterns, "Pattern set")
        ->check(CLI::IsMember({"all", "significant", "refactor"}))
        ->capture_default_str();
    sar->add_option("--out", sar_opt.out_path, "Match NDJSON output (default: stdout)");
    sar->callback([&] { run_sar_scan(sar_opt); });

    CLI::App* stats = app.add_subcommand("stats", "Statistical tests");
    stats->require_subcommand(1);

    McnemarOptions mcnemar_opt;
    CLI::App* mcn = stats->add_subcommand("mcnemar", "Paired test from discordant counts");
    mcn->add_option("--b", mcnemar_opt.b, "First right, second wrong")->required();
    mcn->add_option("--c", mcnemar_opt.c, "First wrong, second right")->required();
    mcn->callback([&] { run_stats_mcnemar(mcnemar_opt); });

    MwuOptions mwu_opt;
    CLI::App* mwu = stats->add_subcommand("mwu", "Mann-Whitney U over two samples");
    mwu->add_option("--x", mwu_opt.x_path, "First sample, whitespace-separated numbers")
        ->required();
    mwu->add_option("--y", mwu_opt.y_path, "Second sample")->required();
    mwu->add_option("--alternative", mwu_opt.alternative, "Alternative hypothesis")
        ->check(CLI::IsMember({"greater", "two-sided"}))
        ->capture_default_str();
    mwu->add_option("--method", mwu_opt.method, "P-value method")
        ->check(CLI::IsMember({"auto", "exact", "normal"}))
        ->capture_default_str();
    mwu->callback([&] { run_stats_mwu(mwu_opt); });

    ReportOptions report_opt;
    CLI::App* report = app.add_subcommand("report", "Render tables and figures");
    report->require_subcommand(1);

    const auto add_output_flags = [&](CLI::App* sub) {
        sub->add_option("--out", report_opt.out_dir, "Output directory")->required();
        sub->add_option("--format", report_opt.format, "Output format")
            ->check(CLI::IsMember({"csv", "json", "plot"}))
            ->capture_default_str();
    };

    CLI::App* categories = report->add_subcommand("categories", "Category distribution");
    categories->add_option("--labels", report_opt.labels_csv, "Labeled commits CSV")->required();
    add_output_flags(categories);
    categories->callback([&] { run_report_categories(report_opt); });

    CLI::App* prodtest = report->add_subcommand("prodtest",
                                                "Production vs test file involvement by category");
    prodtest->add_option("--refcommits", report_opt.refcommits_path, "Refactoring commits NDJSON")
        ->required();
    prodtest->add_option("--labels", report_opt.labels_csv, "Labeled commits CSV")->required();
    prodtest->add_option("--filekinds", report_opt.filekinds_csv, "path,kind CSV");
    prodtest->add_option("--java-root", report_opt.java_root,
                         "Classify .java files under this tree instead");
    prodtest->add_option("--attribution", report_opt.attribution,
                         "Operation counts as test when any/majority of its paths are tests")
        ->check(CLI::IsMember({"any", "majority"}))
        ->capture_default_str();
    add_output_flags(prodtest);
    prodtest->callback([&] { run_report_prodtest(report_opt); });

    CLI::App* labelsplit = report->add_subcommand("labelsplit",
                                                  "Pattern-matched share per refactoring kind");
    labelsplit->add_option("--refcommits", report_opt.refcommits_path,
                           "Refactoring commits NDJSON")
        ->required();
    labelsplit->add_option("--catalog", report_opt.catalog_path, "Pattern catalog")
        ->capture_default_str();
    labelsplit->add_option("--patterns", report_opt.patterns, "Pattern set")
        ->check(CLI::IsMember({"all", "significant", "refactor"}))
        ->capture_default_str();
    add_output_flags(labelsplit);
    labelsplit->callback([&] { run_report_labelsplit(report_opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
