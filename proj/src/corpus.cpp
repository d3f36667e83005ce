#include "refdoc/corpus.hpp"

#include "refdoc/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

using nlohmann::json;

namespace refdoc {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lowercase(std::string s) {
    for (char& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

// Replaces ill-formed UTF-8 bytes with U+FFFD, one replacement per bad byte.
std::string utf8_lossy(std::string_view bytes) {
    static const std::string kReplacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const auto cont = [&](std::size_t k) {
        return i + k < bytes.size() &&
               (static_cast<unsigned char>(bytes[i + k]) & 0xC0u) == 0x80u;
    };
    while (i < bytes.size()) {
        const unsigned char b = static_cast<unsigned char>(bytes[i]);
        std::size_t len = 0;
        if (b < 0x80u) {
            len = 1;
        } else if (b >= 0xC2u && b <= 0xDFu && cont(1)) {
            len = 2;
        } else if (b >= 0xE0u && b <= 0xEFu && cont(1) && cont(2)) {
            const unsigned char b1 = static_cast<unsigned char>(bytes[i + 1]);
            const bool ok = (b == 0xE0u && b1 >= 0xA0u) || (b == 0xEDu && b1 <= 0x9Fu) ||
                            (b != 0xE0u && b != 0xEDu);
            len = ok ? 3 : 0;
        } else if (b >= 0xF0u && b <= 0xF4u && cont(1) && cont(2) && cont(3)) {
            const unsigned char b1 = static_cast<unsigned char>(bytes[i + 1]);
            const bool ok = (b == 0xF0u && b1 >= 0x90u) || (b == 0xF4u && b1 <= 0x8Fu) ||
                            (b != 0xF0u && b != 0xF4u);
            len = ok ? 4 : 0;
        }
        if (len == 0) {
            out += kReplacement;
            ++i;
        } else {
            out.append(bytes.substr(i, len));
            i += len;
        }
    }
    return out;
}

std::string shell_quote(const std::string& arg) {
    std::string out = "'";
    for (char c : arg) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += "'";
    return out;
}

struct GitResult {
    int status = -1;
    std::string output;
};

GitResult run_git(const std::string& repo, const std::string& args) {
    const std::string cmd =
        "git -C " + shell_quote(repo) + " " + args + " 2>/dev/null";
    GitResult result;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return result;
    }
    std::array<char, 65536> buf{};
    std::size_t n = 0;
    while ((n = ::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        result.output.append(buf.data(), n);
    }
    result.status = ::pclose(pipe);
    return result;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) {
                lines.emplace_back(text.substr(start));
            }
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::string normalize_author(const std::string& name, const std::string& email) {
    return lowercase(trim(name)) + " <" + lowercase(trim(email)) + ">";
}

bool is_sha40(std::string_view s) {
    return s.size() == 40 && std::all_of(s.begin(), s.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

json require(const json& obj, const char* key, json::value_t type, const char* where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw MalformedJson(std::string(where) + ": missing \"" + key + "\"");
    }
    const json& v = obj.at(key);
    const bool numeric_ok = type == json::value_t::number_integer &&
                            (v.is_number_integer() || v.is_number_unsigned());
    if (v.type() != type && !numeric_ok) {
        throw MalformedJson(std::string(where) + ": \"" + key + "\" has wrong type");
    }
    return v;
}

std::vector<std::string> string_array(const json& v, const char* where) {
    if (!v.is_array()) {
        throw MalformedJson(std::string(where) + ": expected an array");
    }
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& item : v) {
        if (!item.is_string()) {
            throw MalformedJson(std::string(where) + ": expected string elements");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

} // namespace

std::optional<ElementLevel> parse_element_level(std::string_view name) {
    static const std::map<std::string_view, ElementLevel> kNames = {
        {"method", ElementLevel::Method},       {"attribute", ElementLevel::Attribute},
        {"class", ElementLevel::Class},         {"variable", ElementLevel::Variable},
        {"parameter", ElementLevel::Parameter}, {"package", ElementLevel::Package},
        {"interface", ElementLevel::Interface},
    };
    const auto it = kNames.find(name);
    return it == kNames.end() ? std::nullopt : std::optional<ElementLevel>(it->second);
}

KindCatalog load_kind_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) {
        throw IoError("cannot open kind catalog: " + path);
    }
    KindCatalog catalog;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw IoError(path + ":" + std::to_string(lineno) + ": expected kind<TAB>level");
        }
        const std::string kind = line.substr(0, tab);
        const auto level = parse_element_level(line.substr(tab + 1));
        if (kind.empty() || !level) {
            throw IoError(path + ":" + std::to_string(lineno) + ": bad kind or level");
        }
        catalog[kind] = *level;
    }
    return catalog;
}

std::vector<CommitRecord> ingest_repository(const ProjectRef& ref) {
    if (ref.origin.empty()) {
        throw UnreadableRepo(ref.origin);
    }
    if (run_git(ref.origin, "rev-parse --git-dir").status != 0) {
        throw UnreadableRepo(ref.origin);
    }
    const std::string branch =
        ref.default_branch.empty() ? "HEAD" : ref.default_branch;
    const std::string branch_q = shell_quote(branch);

    const auto parents_out = run_git(ref.origin, "rev-list --parents " + branch_q);
    if (parents_out.status != 0) {
        // A repository with no commits at all yields an empty stream; a
        // branch that fails to resolve in a populated repository is a
        // caller error.
        const auto any = run_git(ref.origin, "rev-list --count --all");
        if (any.status == 0 && trim(any.output) == "0") {
            return {};
        }
        throw UnreadableRepo(ref.origin + " (branch " + branch + ")");
    }

    // DAG over the reachable set: sha -> parents (restricted to reachable).
    std::map<std::string, std::vector<std::string>> parents;
    for (const auto& line : split_lines(parents_out.output)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string sha;
        row >> sha;
        auto& plist = parents[sha];
        std::string p;
        while (row >> p) {
            plist.push_back(p);
        }
    }

    // Full metadata, NUL-separated records (git forbids NUL in messages).
    const auto meta_out = run_git(
        ref.origin,
        "log " + branch_q + " --pretty=format:%H%x1f%an%x1f%ae%x1f%ct%x1f%B%x00");
    if (meta_out.status != 0) {
        throw UnreadableRepo(ref.origin);
    }
    std::map<std::string, CommitRecord> records;
    std::size_t pos = 0;
    const std::string& meta = meta_out.output;
    while (pos < meta.size()) {
        auto end = meta.find('\0', pos);
        if (end == std::string::npos) {
            end = meta.size();
        }
        std::string_view record(meta.data() + pos, end - pos);
        pos = end + 1;
        if (record.empty() || record == "\n") {
            continue;
        }
        if (!record.empty() && record.front() == '\n') {
            record.remove_prefix(1);
        }
        std::array<std::string_view, 5> fields{};
        std::size_t field_start = 0;
        for (std::size_t f = 0; f < 4; ++f) {
            const auto us = record.find('\x1f', field_start);
            if (us == std::string_view::npos) {
                throw UnreadableRepo(ref.origin + " (unparseable log output)");
            }
            fields[f] = record.substr(field_start, us - field_start);
            field_start = us + 1;
        }
        fields[4] = record.substr(field_start);

        CommitRecord rec;
        rec.project_id = ref.project_id;
        rec.sha = lowercase(std::string(fields[0]));
        rec.author_id = normalize_author(utf8_lossy(fields[1]), utf8_lossy(fields[2]));
        rec.timestamp = std::strtoll(std::string(fields[3]).c_str(), nullptr, 10);
        rec.message = utf8_lossy(fields[4]);
        records[rec.sha] = std::move(rec);
    }

    // Changed paths; merge commits report none (default diff suppression).
    const auto paths_out = run_git(
        ref.origin,
        "-c core.quotePath=false log " + branch_q + " --name-only --pretty=format:%x01%H");
    if (paths_out.status == 0) {
        std::string current;
        for (const auto& line : split_lines(paths_out.output)) {
            if (!line.empty() && line[0] == '\x01') {
                current = lowercase(line.substr(1));
            } else if (!line.empty() && !current.empty()) {
                const auto it = records.find(current);
                if (it != records.end()) {
                    it->second.changed_paths.push_back(line);
                }
            }
        }
    }

    // Kahn's algorithm: parents emitted before children; whenever several
    // commits are ready at once, lowest (timestamp, sha) goes first.
    std::map<std::string, std::vector<std::string>> children;
    std::map<std::string, std::size_t> indegree;
    for (const auto& [sha, plist] : parents) {
        indegree.emplace(sha, 0);
    }
    for (const auto& [sha, plist] : parents) {
        for (const auto& p : plist) {
            if (parents.count(p) != 0) {
                children[p].push_back(sha);
                ++indegree[sha];
            }
        }
    }
    using Key = std::pair<std::int64_t, std::string>;
    std::priority_queue<Key, std::vector<Key>, std::greater<Key>> ready;
    for (const auto& [sha, deg] : indegree) {
        if (deg == 0) {
            const auto it = records.find(sha);
            ready.emplace(it == records.end() ? 0 : it->second.timestamp, sha);
        }
    }
    std::vector<CommitRecord> out;
    out.reserve(records.size());
    while (!ready.empty()) {
        const auto [ts, sha] = ready.top();
        ready.pop();
        const auto rec = records.find(sha);
        if (rec != records.end()) {
            out.push_back(rec->second);
        }
        const auto kids = children.find(sha);
        if (kids != children.end()) {
            for (const auto& kid : kids->second) {
                if (--indegree[kid] == 0) {
                    const auto it = records.find(kid);
                    ready.emplace(it == records.end() ? 0 : it->second.timestamp, kid);
                }
            }
        }
    }
    return out;
}

std::map<std::string, std::vector<RefactoringOperation>> parse_refminer_json(
    const std::string& payload, const KindCatalog& catalog) {
    json doc;
    try {
        doc = json::parse(payload);
    } catch (const json::exception& e) {
        throw MalformedJson(e.what());
    }
    const json commits = require(doc, "commits", json::value_t::array, "payload");
    std::map<std::string, std::vector<RefactoringOperation>> out;
    for (const auto& commit : commits) {
        const std::string sha =
            lowercase(require(commit, "sha1", json::value_t::string, "commit")
                          .get<std::string>());
        const json refs =
            require(commit, "refactorings", json::value_t::array, "commit");
        if (refs.empty()) {
            continue;
        }
        auto& ops = out[sha];
        for (const auto& entry : refs) {
            RefactoringOperation op;
            op.kind = require(entry, "type", json::value_t::string, "refactoring")
                          .get<std::string>();
            const auto kind_it = catalog.find(op.kind);
            if (kind_it == catalog.end()) {
                throw UnknownRefactoringKind(op.kind);
            }
            op.element_level = kind_it->second;
            if (entry.contains("description")) {
                if (!entry.at("description").is_string()) {
                    throw MalformedJson("refactoring: \"description\" has wrong type");
                }
                op.description = entry.at("description").get<std::string>();
            }
            std::set<std::string> paths;
            for (const char* side : {"leftSideLocations", "rightSideLocations"}) {
                if (!entry.contains(side)) {
                    continue;
                }
                const json& locs = entry.at(side);
                if (!locs.is_array()) {
                    throw MalformedJson(std::string("refactoring: \"") + side +
                                        "\" has wrong type");
                }
                for (const auto& loc : locs) {
                    if (loc.is_object() && loc.contains("filePath") &&
                        loc.at("filePath").is_string()) {
                        paths.insert(loc.at("filePath").get<std::string>());
                    }
                }
            }
            op.involved_paths.assign(paths.begin(), paths.end());
            ops.push_back(std::move(op));
        }
        if (ops.empty()) {
            out.erase(sha);
        }
    }
    return out;
}

JoinResult join_refactorings(
    const std::vector<CommitRecord>& commits,
    const std::map<std::string, std::vector<RefactoringOperation>>& ops) {
    JoinResult result;
    std::set<std::string> matched;
    for (const auto& commit : commits) {
        const auto it = ops.find(commit.sha);
        if (it != ops.end()) {
            result.refcommits.push_back({commit, it->second});
            matched.insert(commit.sha);
        }
    }
    for (const auto& [sha, oplist] : ops) {
        if (matched.count(sha) == 0) {
            result.orphans.emplace(sha, oplist);
        }
    }
    return result;
}

namespace {

double population_stddev(const std::vector<double>& xs) {
    if (xs.empty()) {
        return 0.0;
    }
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double acc = 0.0;
    for (double x : xs) {
        acc += (x - mean) * (x - mean);
    }
    return std::sqrt(acc / xs.size());
}

} // namespace

CorpusStats compute_corpus_stats(const std::vector<ProjectRef>& projects,
                                 const std::vector<CommitRecord>& commits,
                                 const std::vector<RefactoringCommit>& refcommits) {
    CorpusStats stats;
    stats.project_count = projects.size();
    stats.total_commits = commits.size();
    stats.refactoring_commits = refcommits.size();

    std::map<std::string, double> commits_per;
    std::map<std::string, double> refcommits_per;
    std::map<std::string, double> ops_per;
    for (const auto& p : projects) {
        commits_per[p.project_id] = 0.0;
        refcommits_per[p.project_id] = 0.0;
        ops_per[p.project_id] = 0.0;
    }
    for (const auto& c : commits) {
        commits_per[c.project_id] += 1.0;
    }
    for (const auto& rc : refcommits) {
        refcommits_per[rc.commit.project_id] += 1.0;
        ops_per[rc.commit.project_id] += static_cast<double>(rc.operations.size());
        stats.refactoring_operations += rc.operations.size();
        for (const auto& op : rc.operations) {
            ++stats.per_element_counts[op.element_level];
            ++stats.per_kind_counts[op.kind];
        }
    }

    const auto values = [](const std::map<std::string, double>& m) {
        std::vector<double> v;
        v.reserve(m.size());
        for (const auto& [k, x] : m) {
            v.push_back(x);
        }
        return v;
    };
    stats.per_project_stddevs["commits"] = population_stddev(values(commits_per));
    stats.per_project_stddevs["refactoring_commits"] =
        population_stddev(values(refcommits_per));
    stats.per_project_stddevs["refactoring_operations"] =
        population_stddev(values(ops_per));
    return stats;
}

std::vector<CommitRecord> sample_nonrefactoring(
    const std::vector<CommitRecord>& commits,
    const std::vector<RefactoringCommit>& refcommits, std::uint64_t seed,
    std::size_t target_size) {
    if (target_size == 0) {
        return {};
    }

    std::set<std::pair<std::string, std::string>> ref_keys;
    std::set<std::string> ref_projects;
    std::set<std::string> ref_authors;
    std::int64_t t_min = std::numeric_limits<std::int64_t>::max();
    std::int64_t t_max = std::numeric_limits<std::int64_t>::min();
    double ref_length_sum = 0.0;
    for (const auto& rc : refcommits) {
        ref_keys.emplace(rc.commit.project_id, rc.commit.sha);
        ref_projects.insert(rc.commit.project_id);
        ref_authors.insert(rc.commit.author_id);
        t_min = std::min(t_min, rc.commit.timestamp);
        t_max = std::max(t_max, rc.commit.timestamp);
        ref_length_sum += static_cast<double>(rc.commit.message.size());
    }

    // Hard constraints in declaration order, so the first one that starves
    // the pool is the one reported.
    std::vector<const CommitRecord*> pool;
    for (const auto& c : commits) {
        if (ref_keys.count({c.project_id, c.sha}) == 0) {
            pool.push_back(&c);
        }
    }
    const auto filter = [&](auto pred, const char* constraint) {
        std::vector<const CommitRecord*> kept;
        kept.reserve(pool.size());
        for (const auto* c : pool) {
            if (pred(*c)) {
                kept.push_back(c);
            }
        }
        pool = std::move(kept);
        if (pool.size() < target_size) {
            throw InsufficientCandidates(constraint);
        }
    };
    filter([&](const CommitRecord& c) { return ref_projects.count(c.project_id) != 0; },
           "project");
    filter([&](const CommitRecord& c) {
        return c.timestamp >= t_min && c.timestamp <= t_max;
    },
           "time-window");

    // Author matching is best-effort: restrict to matching authors only when
    // doing so still leaves a big enough pool.
    {
        std::vector<const CommitRecord*> by_author;
        for (const auto* c : pool) {
            if (ref_authors.count(c->author_id) != 0) {
                by_author.push_back(c);
            }
        }
        if (by_author.size() >= target_size) {
            pool = std::move(by_author);
        }
    }

    std::sort(pool.begin(), pool.end(), [](const CommitRecord* a, const CommitRecord* b) {
        return std::tie(a->project_id, a->sha) < std::tie(b->project_id, b->sha);
    });
    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);

    std::vector<const CommitRecord*> sample(pool.begin(), pool.begin() + target_size);
    std::vector<const CommitRecord*> rest(pool.begin() + target_size, pool.end());

    // Greedy swap rebalancing toward the refactoring corpus mean length.
    const double ref_mean =
        refcommits.empty() ? 0.0 : ref_length_sum / static_cast<double>(refcommits.size());
    const double lo = 0.9 * ref_mean;
    const double hi = 1.1 * ref_mean;
    double sum = 0.0;
    for (const auto* c : sample) {
        sum += static_cast<double>(c->message.size());
    }
    const auto length_of = [](const CommitRecord* c) {
        return static_cast<double>(c->message.size());
    };
    const double n = static_cast<double>(sample.size());
    for (std::size_t guard = 0; guard < sample.size() * (rest.size() + 1) + 1; ++guard) {
        const double mean = sum / n;
        if (mean >= lo && mean <= hi) {
            break;
        }
        // Swap out the worst offender; swap in whichever unused commit
        // lands the sample mean closest to the refactoring-corpus mean.
        const bool too_long = mean > hi;
        std::size_t si = 0;
        for (std::size_t i = 1; i < sample.size(); ++i) {
            if (too_long ? length_of(sample[i]) > length_of(sample[si])
                         : length_of(sample[i]) < length_of(sample[si])) {
                si = i;
            }
        }
        std::size_t ri = rest.size();
        double best_gap = std::abs(mean - ref_mean);
        for (std::size_t i = 0; i < rest.size(); ++i) {
            const double candidate_mean =
                (sum - length_of(sample[si]) + length_of(rest[i])) / n;
            const double gap = std::abs(candidate_mean - ref_mean);
            if (gap < best_gap) {
                best_gap = gap;
                ri = i;
            }
        }
        if (ri == rest.size()) {
            throw InsufficientCandidates("message-length");
        }
        sum += length_of(rest[ri]) - length_of(sample[si]);
        std::swap(sample[si], rest[ri]);
    }
    {
        const double mean = sum / static_cast<double>(sample.size());
        if (!(mean >= lo && mean <= hi)) {
            throw InsufficientCandidates("message-length");
        }
    }

    std::sort(sample.begin(), sample.end(),
              [](const CommitRecord* a, const CommitRecord* b) {
                  return std::tie(a->project_id, a->sha) < std::tie(b->project_id, b->sha);
              });
    std::vector<CommitRecord> out;
    out.reserve(sample.size());
    for (const auto* c : sample) {
        out.push_back(*c);
    }
    return out;
}

namespace {

json commit_json(const CommitRecord& c) {
    return json{{"project_id", utf8_lossy(c.project_id)},
                {"sha", c.sha},
                {"author_id", utf8_lossy(c.author_id)},
                {"timestamp", c.timestamp},
                {"message", utf8_lossy(c.message)},
                {"changed_paths", c.changed_paths}};
}

CommitRecord commit_from(const json& obj, const char* where) {
    CommitRecord c;
    c.project_id = require(obj, "project_id", json::value_t::string, where).get<std::string>();
    c.sha = require(obj, "sha", json::value_t::string, where).get<std::string>();
    if (!is_sha40(c.sha)) {
        throw MalformedJson(std::string(where) + ": \"sha\" must be 40 lowercase hex chars");
    }
    c.author_id = require(obj, "author_id", json::value_t::string, where).get<std::string>();
    c.timestamp =
        require(obj, "timestamp", json::value_t::number_integer, where).get<std::int64_t>();
    c.changed_paths =
        string_array(require(obj, "changed_paths", json::value_t::array, where), where);
    c.message = require(obj, "message", json::value_t::string, where).get<std::string>();
    return c;
}

json op_json(const RefactoringOperation& op) {
    return json{{"kind", op.kind},
                {"description", utf8_lossy(op.description)},
                {"element_level", std::string(element_level_name(op.element_level))},
                {"involved_paths", op.involved_paths}};
}

RefactoringOperation op_from(const json& obj) {
    RefactoringOperation op;
    op.kind = require(obj, "kind", json::value_t::string, "operation").get<std::string>();
    op.description =
        require(obj, "description", json::value_t::string, "operation").get<std::string>();
    const std::string level =
        require(obj, "element_level", json::value_t::string, "operation").get<std::string>();
    const auto parsed = parse_element_level(level);
    if (!parsed) {
        throw MalformedJson("operation: unknown element_level \"" + level + "\"");
    }
    op.element_level = *parsed;
    op.involved_paths = string_array(
        require(obj, "involved_paths", json::value_t::array, "operation"), "operation");
    return op;
}

json parse_line(const std::string& line) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw MalformedJson(e.what());
    }
}

} // namespace

std::string commit_to_json(const CommitRecord& c) {
    return commit_json(c).dump();
}

CommitRecord commit_from_json(const std::string& line) {
    return commit_from(parse_line(line), "commit");
}

void write_commits_ndjson(const std::vector<CommitRecord>& commits,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) {
        throw IoError("cannot open for writing: " + path);
    }
    for (const auto& c : commits) {
        out << commit_to_json(c) << '\n';
    }
    if (!out.good()) {
        throw IoError("write failed: " + path);
    }
}

std::vector<CommitRecord> read_commits_ndjson(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) {
        throw IoError("cannot open: " + path);
    }
    std::vector<CommitRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        out.push_back(commit_from_json(line));
    }
    return out;
}

std::string refcommit_to_json(const RefactoringCommit& rc) {
    json ops = json::array();
    for (const auto& op : rc.operations) {
        ops.push_back(op_json(op));
    }
    return json{{"commit", commit_json(rc.commit)}, {"operations", std::move(ops)}}.dump();
}

RefactoringCommit refcommit_from_json(const std::string& line) {
    const json doc = parse_line(line);
    RefactoringCommit rc;
    rc.commit =
        commit_from(require(doc, "commit", json::value_t::object, "refcommit"), "refcommit");
    const json ops = require(doc, "operations", json::value_t::array, "refcommit");
    if (ops.empty()) {
        throw MalformedJson("refcommit: \"operations\" must be non-empty");
    }
    for (const auto& op : ops) {
        rc.operations.push_back(op_from(op));
    }
    return rc;
}

void write_refcommits_ndjson(const std::vector<RefactoringCommit>& rcs,
                             const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) {
        throw IoError("cannot open for writing: " + path);
    }
    for (const auto& rc : rcs) {
        out << refcommit_to_json(rc) << '\n';
    }
    if (!out.good()) {
        throw IoError("write failed: " + path);
    }
}

std::vector<RefactoringCommit> read_refcommits_ndjson(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) {
        throw IoError("cannot open: " + path);
    }
    std::vector<RefactoringCommit> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        out.push_back(refcommit_from_json(line));
    }
    return out;
}

std::string corpus_stats_to_json(const CorpusStats& stats) {
    json elements = json::object();
    for (const auto& [level, count] : stats.per_element_counts) {
        elements[std::string(element_level_name(level))] = count;
    }
    const json doc{{"project_count", stats.project_count},
                   {"total_commits", stats.total_commits},
                   {"refactoring_commits", stats.refactoring_commits},
                   {"refactoring_operations", stats.refactoring_operations},
                   {"per_element_counts", std::move(elements)},
                   {"per_kind_counts", stats.per_kind_counts},
                   {"per_project_stddevs", stats.per_project_stddevs}};
    return doc.dump(2) + "\n";
}

} // namespace refdoc
