#pragma once

#include "refdoc/categories.hpp"
#include "refdoc/classify.hpp"
#include "refdoc/corpus.hpp"
#include "refdoc/sarpatterns.hpp"
#include "refdoc/testdetect.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace refdoc {

struct CountShare {
    std::size_t count = 0;
    double percentage = 0.0;
};

// How the classified commits spread over the five categories. All five rows
// are always present; percentages sum to 100 (0 when the input is empty).
struct CategoryDistribution {
    std::map<Category, CountShare> per_category;
    std::size_t total = 0;
};

CategoryDistribution category_distribution(const std::vector<LabeledCommit>& classified);

// Whether an operation touching both file kinds lands in the test column
// when any involved path is a test file, or only when most are.
enum class PathAttribution { AnyTest, MajorityTest };

// (refactoring kind, commit category, production|test) -> count and
// column-wise percentage: within each (category, file-kind) column the
// percentages over kinds sum to 100.
struct ProdTestMatrix {
    // cells[kind][category][0]=production, [1]=test
    std::map<std::string, std::map<Category, std::array<CountShare, 2>>> cells;
    std::size_t total_operations = 0;
};

ProdTestMatrix prod_test_matrix(const std::vector<RefactoringCommit>& refcommits,
                                const std::map<std::string, Category>& labels,
                                const std::map<std::string, FileKind>& file_kinds,
                                PathAttribution attribution = PathAttribution::AnyTest);

// Serializers. Every emitter is deterministic: identical inputs produce
// byte-identical output (sorted keys, percentages fixed to 2 decimals).
std::string category_distribution_csv(const CategoryDistribution& dist);
std::string category_distribution_json(const CategoryDistribution& dist);
std::string category_distribution_svg(const CategoryDistribution& dist); // pie chart

std::string prod_test_matrix_csv(const ProdTestMatrix& matrix);
std::string prod_test_matrix_json(const ProdTestMatrix& matrix);

std::string label_split_csv(const std::map<std::string, LabelSplit>& split);
std::string label_split_json(const std::map<std::string, LabelSplit>& split);
std::string label_split_svg(const std::map<std::string, LabelSplit>& split); // stacked bars

// Writes bytes to a file, throwing IoError on any failure.
void write_text_file(const std::string& path, std::string_view bytes);

} // namespace refdoc
