#include "refdoc/report.hpp"

#include "refdoc/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

using nlohmann::json;

namespace refdoc {

namespace {

std::string fixed2(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    // Avoid the two representations of zero.
    if (std::string_view(buf) == "-0.00") {
        return "0.00";
    }
    return buf;
}

double round2(double value) {
    return std::round(value * 100.0) / 100.0;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += "\"";
    return out;
}

} // namespace

CategoryDistribution category_distribution(const std::vector<LabeledCommit>& classified) {
    CategoryDistribution dist;
    for (Category c : kAllCategories) {
        dist.per_category[c] = {};
    }
    dist.total = classified.size();
    for (const auto& lc : classified) {
        ++dist.per_category[lc.label].count;
    }
    if (dist.total > 0) {
        for (auto& [cat, share] : dist.per_category) {
            share.percentage =
                100.0 * static_cast<double>(share.count) / static_cast<double>(dist.total);
        }
    }
    return dist;
}

ProdTestMatrix prod_test_matrix(const std::vector<RefactoringCommit>& refcommits,
                                const std::map<std::string, Category>& labels,
                                const std::map<std::string, FileKind>& file_kinds,
                                PathAttribution attribution) {
    ProdTestMatrix matrix;
    for (const auto& rc : refcommits) {
        const auto label_it = labels.find(rc.commit.sha);
        if (label_it == labels.end()) {
            throw Error("commit has no category label: " + rc.commit.sha);
        }
        const Category category = label_it->second;
        for (const auto& op : rc.operations) {
            std::size_t test_paths = 0;
            std::size_t production_paths = 0;
            for (const auto& path : op.involved_paths) {
                const auto kind_it = file_kinds.find(path);
                if (kind_it == file_kinds.end()) {
                    throw UnclassifiedPath(path);
                }
                if (kind_it->second == FileKind::Test) {
                    ++test_paths;
                } else {
                    ++production_paths; // unparseable never reads as test
                }
            }
            const bool is_test = attribution == PathAttribution::AnyTest
                                     ? test_paths > 0
                                     : test_paths > production_paths;
            ++matrix.cells[op.kind][category][is_test ? 1 : 0].count;
            ++matrix.total_operations;
        }
    }

    // Column-wise percentages: a column is one (category, file kind) pair.
    for (Category cat : kAllCategories) {
        for (std::size_t fk = 0; fk < 2; ++fk) {
            std::size_t column_total = 0;
            for (const auto& [kind, row] : matrix.cells) {
                const auto cell = row.find(cat);
                if (cell != row.end()) {
                    column_total += cell->second[fk].count;
                }
            }
            if (column_total == 0) {
                continue;
            }
            for (auto& [kind, row] : matrix.cells) {
                auto cell = row.find(cat);
                if (cell != row.end()) {
                    cell->second[fk].percentage =
                        100.0 * static_cast<double>(cell->second[fk].count) /
                        static_cast<double>(column_total);
                }
            }
        }
    }
    return matrix;
}

std::string category_distribution_csv(const CategoryDistribution& dist) {
    std::ostringstream out;
    out << "category,count,percentage\n";
    for (Category c : kAllCategories) {
        const auto& share = dist.per_category.at(c);
        out << category_name(c) << ',' << share.count << ',' << fixed2(share.percentage)
            << '\n';
    }
    out << "total," << dist.total << ',' << fixed2(dist.total > 0 ? 100.0 : 0.0) << '\n';
    return out.str();
}

std::string category_distribution_json(const CategoryDistribution& dist) {
    json per = json::object();
    for (Category c : kAllCategories) {
        const auto& share = dist.per_category.at(c);
        per[std::string(category_name(c))] = {{"count", share.count},
                                              {"percentage", round2(share.percentage)}};
    }
    const json doc{{"per_category", std::move(per)}, {"total", dist.total}};
    return doc.dump(2) + "\n";
}

std::string prod_test_matrix_csv(const ProdTestMatrix& matrix) {
    std::ostringstream out;
    out << "kind,category,file_kind,count,percentage\n";
    for (const auto& [kind, row] : matrix.cells) {
        for (Category cat : kAllCategories) {
            const auto cell = row.find(cat);
            for (std::size_t fk = 0; fk < 2; ++fk) {
                const CountShare share =
                    cell == row.end() ? CountShare{} : cell->second[fk];
                out << csv_field(kind) << ',' << category_name(cat) << ','
                    << (fk == 0 ? "production" : "test") << ',' << share.count << ','
                    << fixed2(share.percentage) << '\n';
            }
        }
    }
    return out.str();
}

std::string prod_test_matrix_json(const ProdTestMatrix& matrix) {
    json cells = json::object();
    for (const auto& [kind, row] : matrix.cells) {
        json per_cat = json::object();
        for (Category cat : kAllCategories) {
            const auto cell = row.find(cat);
            const CountShare prod = cell == row.end() ? CountShare{} : cell->second[0];
            const CountShare test = cell == row.end() ? CountShare{} : cell->second[1];
            per_cat[std::string(category_name(cat))] = {
                {"production",
                 {{"count", prod.count}, {"percentage", round2(prod.percentage)}}},
                {"test", {{"count", test.count}, {"percentage", round2(test.percentage)}}}};
        }
        cells[kind] = std::move(per_cat);
    }
    const json doc{{"cells", std::move(cells)},
                   {"total_operations", matrix.total_operations}};
    return doc.dump(2) + "\n";
}

std::string label_split_csv(const std::map<std::string, LabelSplit>& split) {
    std::ostringstream out;
    out << "kind,labeled,unlabeled,total,labeled_percentage\n";
    for (const auto& [kind, counts] : split) {
        const std::size_t total = counts.labeled + counts.unlabeled;
        const double pct =
            total == 0 ? 0.0
                       : 100.0 * static_cast<double>(counts.labeled) /
                             static_cast<double>(total);
        out << csv_field(kind) << ',' << counts.labeled << ',' << counts.unlabeled << ','
            << total << ',' << fixed2(pct) << '\n';
    }
    return out.str();
}

std::string label_split_json(const std::map<std::string, LabelSplit>& split) {
    json per = json::object();
    for (const auto& [kind, counts] : split) {
        const std::size_t total = counts.labeled + counts.unlabeled;
        const double pct =
            total == 0 ? 0.0
                       : 100.0 * static_cast<double>(counts.labeled) /
                             static_cast<double>(total);
        per[kind] = {{"labeled", counts.labeled},
                     {"unlabeled", counts.unlabeled},
                     {"total", total},
                     {"labeled_percentage", round2(pct)}};
    }
    return json{{"per_kind", std::move(per)}}.dump(2) + "\n";
}

namespace {

// Fixed palette, picked for contrast on white; order matches the canonical
// category order.
constexpr std::array<std::string_view, 5> kPalette = {
    "#4e79a7", "#e15759", "#59a14f", "#f28e2b", "#b07aa1",
};

std::string svg_header(int width, int height) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
        << "\">\n<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    return out.str();
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

std::string category_distribution_svg(const CategoryDistribution& dist) {
    const int width = 640;
    const int height = 420;
    const double cx = 210.0;
    const double cy = 210.0;
    const double r = 160.0;

    std::ostringstream out;
    out << svg_header(width, height);
    out << "<title>commits per category</title>\n";

    if (dist.total == 0) {
        out << "<text x=\"" << fixed2(cx) << "\" y=\"" << fixed2(cy)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
               "no classified commits</text>\n</svg>\n";
        return out.str();
    }

    // Slices clockwise from 12 o'clock, canonical category order.
    double angle = -90.0;
    for (std::size_t i = 0; i < kAllCategories.size(); ++i) {
        const Category cat = kAllCategories[i];
        const auto& share = dist.per_category.at(cat);
        if (share.count == 0) {
            continue;
        }
        const double sweep = 360.0 * static_cast<double>(share.count) /
                             static_cast<double>(dist.total);
        if (share.count == dist.total) {
            out << "<circle cx=\"" << fixed2(cx) << "\" cy=\"" << fixed2(cy)
                << "\" r=\"" << fixed2(r) << "\" fill=\"" << kPalette[i] << "\"/>\n";
            break;
        }
        const double a0 = angle * std::numbers::pi / 180.0;
        const double a1 = (angle + sweep) * std::numbers::pi / 180.0;
        const double x0 = cx + r * std::cos(a0);
        const double y0 = cy + r * std::sin(a0);
        const double x1 = cx + r * std::cos(a1);
        const double y1 = cy + r * std::sin(a1);
        const int large = sweep > 180.0 ? 1 : 0;
        out << "<path d=\"M " << fixed2(cx) << ' ' << fixed2(cy) << " L " << fixed2(x0)
            << ' ' << fixed2(y0) << " A " << fixed2(r) << ' ' << fixed2(r) << " 0 "
            << large << " 1 " << fixed2(x1) << ' ' << fixed2(y1) << " Z\" fill=\""
            << kPalette[i] << "\"/>\n";
        angle += sweep;
    }

    // Legend.
    double ly = 80.0;
    for (std::size_t i = 0; i < kAllCategories.size(); ++i) {
        const Category cat = kAllCategories[i];
        const auto& share = dist.per_category.at(cat);
        out << "<rect x=\"420\" y=\"" << fixed2(ly - 12.0)
            << "\" width=\"14\" height=\"14\" fill=\"" << kPalette[i] << "\"/>\n";
        out << "<text x=\"442\" y=\"" << fixed2(ly)
            << "\" font-family=\"sans-serif\" font-size=\"14\">"
            << xml_escape(category_name(cat)) << ' ' << fixed2(share.percentage)
            << "% (" << share.count << ")</text>\n";
        ly += 26.0;
    }
    out << "</svg>\n";
    return out.str();
}

std::string label_split_svg(const std::map<std::string, LabelSplit>& split) {
    const int width = 720;
    const int bar_height = 22;
    const int gap = 10;
    const int top = 40;
    const int left = 230;
    const int bar_span = 380;
    const int height =
        top + static_cast<int>(split.size()) * (bar_height + gap) + 40;

    std::ostringstream out;
    out << svg_header(width, height);
    out << "<title>operations with matching messages per kind</title>\n";
    out << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" "
           "font-size=\"14\">matched (dark) vs unmatched (light)</text>\n";

    int y = top;
    for (const auto& [kind, counts] : split) {
        const std::size_t total = counts.labeled + counts.unlabeled;
        const double frac =
            total == 0 ? 0.0
                       : static_cast<double>(counts.labeled) / static_cast<double>(total);
        const double filled = frac * bar_span;
        out << "<text x=\"" << (left - 10) << "\" y=\"" << (y + bar_height - 6)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\">"
            << xml_escape(kind) << "</text>\n";
        out << "<rect x=\"" << left << "\" y=\"" << y << "\" width=\"" << bar_span
            << "\" height=\"" << bar_height << "\" fill=\"#d0d7de\"/>\n";
        out << "<rect x=\"" << left << "\" y=\"" << y << "\" width=\"" << fixed2(filled)
            << "\" height=\"" << bar_height << "\" fill=\"#4e79a7\"/>\n";
        out << "<text x=\"" << (left + bar_span + 8) << "\" y=\"" << (y + bar_height - 6)
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << counts.labeled << "/"
            << total << "</text>\n";
        y += bar_height + gap;
    }
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) {
        throw IoError("cannot open for writing: " + path);
    }
    out << bytes;
    out.flush();
    if (!out.good()) {
        throw IoError("write failed: " + path);
    }
}

} // namespace refdoc
