#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace refdoc {

// The five motivation labels. The declaration order is canonical: every
// tie-break in the toolkit resolves to the lowest value in this order.
enum class Category : int {
    Functional = 0,
    BugFix = 1,
    InternalQA = 2,
    ExternalQA = 3,
    CodeSmell = 4,
};

inline constexpr std::array<Category, 5> kAllCategories = {
    Category::Functional, Category::BugFix, Category::InternalQA,
    Category::ExternalQA, Category::CodeSmell,
};

inline constexpr std::size_t kCategoryCount = kAllCategories.size();

constexpr std::string_view category_name(Category c) {
    switch (c) {
        case Category::Functional: return "Functional";
        case Category::BugFix:     return "BugFix";
        case Category::InternalQA: return "InternalQA";
        case Category::ExternalQA: return "ExternalQA";
        case Category::CodeSmell:  return "CodeSmell";
    }
    return "?";
}

inline std::optional<Category> parse_category(std::string_view name) {
    for (Category c : kAllCategories) {
        if (category_name(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

} // namespace refdoc
