#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refdoc {

struct ProjectRef {
    std::string project_id;
    std::string origin;         // local path or remote URL
    std::string default_branch; // empty means the repository HEAD
};

struct CommitRecord {
    std::string project_id;
    std::string sha;       // 40 lowercase hex chars
    std::string author_id; // normalized "name <email>"
    std::int64_t timestamp = 0;
    std::string message;
    std::vector<std::string> changed_paths;
};

// Code-element granularity of a refactoring kind.
enum class ElementLevel { Method, Attribute, Class, Variable, Parameter, Package, Interface };

constexpr std::string_view element_level_name(ElementLevel e) {
    switch (e) {
        case ElementLevel::Method:    return "method";
        case ElementLevel::Attribute: return "attribute";
        case ElementLevel::Class:     return "class";
        case ElementLevel::Variable:  return "variable";
        case ElementLevel::Parameter: return "parameter";
        case ElementLevel::Package:   return "package";
        case ElementLevel::Interface: return "interface";
    }
    return "?";
}

std::optional<ElementLevel> parse_element_level(std::string_view name);

// Closed catalog of recognized refactoring kinds and their element level,
// loaded from data/refactoring_kinds.tsv ("kind<TAB>level").
using KindCatalog = std::map<std::string, ElementLevel>;

KindCatalog load_kind_catalog(const std::string& path);

struct RefactoringOperation {
    std::string kind;
    std::string description;
    ElementLevel element_level = ElementLevel::Method;
    std::vector<std::string> involved_paths;
};

struct RefactoringCommit {
    CommitRecord commit;
    std::vector<RefactoringOperation> operations; // never empty
};

struct CorpusStats {
    std::size_t project_count = 0;
    std::size_t total_commits = 0;
    std::size_t refactoring_commits = 0;
    std::size_t refactoring_operations = 0;
    std::map<ElementLevel, std::size_t> per_element_counts;
    std::map<std::string, std::size_t> per_kind_counts;
    // Population standard deviation (divisor N) of the per-project counts,
    // keyed "commits", "refactoring_commits", "refactoring_operations".
    std::map<std::string, double> per_project_stddevs;
};

// Every commit reachable from the project's branch, parents before children,
// equal-rank commits ordered by (timestamp, sha). Messages are UTF-8 with
// invalid sequences lossy-replaced. An empty repository yields an empty
// vector; a missing or non-git origin throws UnreadableRepo.
std::vector<CommitRecord> ingest_repository(const ProjectRef& ref);

// Refactoring Miner output: {"commits": [{"sha1": ..., "refactorings":
// [{"type": ..., "description": ...}, ...]}, ...]}. Commits whose
// refactoring list is empty are omitted. Unknown type strings throw
// UnknownRefactoringKind; anything structurally wrong throws MalformedJson.
std::map<std::string, std::vector<RefactoringOperation>> parse_refminer_json(
    const std::string& payload, const KindCatalog& catalog);

struct JoinResult {
    std::vector<RefactoringCommit> refcommits;
    // Operations whose sha never appeared in the commit stream.
    std::map<std::string, std::vector<RefactoringOperation>> orphans;
};

JoinResult join_refactorings(const std::vector<CommitRecord>& commits,
                             const std::map<std::string, std::vector<RefactoringOperation>>& ops);

CorpusStats compute_corpus_stats(const std::vector<ProjectRef>& projects,
                                 const std::vector<CommitRecord>& commits,
                                 const std::vector<RefactoringCommit>& refcommits);

// Seeded draw of `target_size` commits with no detected refactorings,
// matched to the refactoring corpus: same projects, same time window, same
// authors when enough such candidates exist, and a sample mean message
// length within 10% of the refactoring-corpus mean (greedy swap
// rebalancing). Throws InsufficientCandidates naming the first constraint
// that starves the pool.
std::vector<CommitRecord> sample_nonrefactoring(const std::vector<CommitRecord>& commits,
                                                const std::vector<RefactoringCommit>& refcommits,
                                                std::uint64_t seed,
                                                std::size_t target_size);

// Newline-delimited JSON interchange.
std::string commit_to_json(const CommitRecord& c);
CommitRecord commit_from_json(const std::string& line);
void write_commits_ndjson(const std::vector<CommitRecord>& commits, const std::string& path);
std::vector<CommitRecord> read_commits_ndjson(const std::string& path);

std::string refcommit_to_json(const RefactoringCommit& rc);
RefactoringCommit refcommit_from_json(const std::string& line);
void write_refcommits_ndjson(const std::vector<RefactoringCommit>& rcs, const std::string& path);
std::vector<RefactoringCommit> read_refcommits_ndjson(const std::string& path);

std::string corpus_stats_to_json(const CorpusStats& stats);

} // namespace refdoc
