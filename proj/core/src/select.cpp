#include "countersign/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "countersign/pca.hpp"
#include "countersign/stats.hpp"

namespace csign {

std::string to_string(SelectionMethod method) {
    switch (method) {
        case SelectionMethod::PCA: return "pca";
        case SelectionMethod::MAX_STD: return "max_std";
        case SelectionMethod::MAX_VAR: return "max_var";
        case SelectionMethod::FISHER: return "fisher";
    }
    return "?";
}

SelectionMethod selection_method_from_string(const std::string& name) {
    if (name == "pca") return SelectionMethod::PCA;
    if (name == "max_std") return SelectionMethod::MAX_STD;
    if (name == "max_var") return SelectionMethod::MAX_VAR;
    if (name == "fisher") return SelectionMethod::FISHER;
    throw std::invalid_argument("unknown selection method: " + name);
}

CounterSelection select_counters(const std::vector<std::array<double, kEventCount>>& rows,
                                 SelectionMethod method, std::size_t z,
                                 const std::vector<int>* labels) {
    if (z < 1 || z > kEventCount) throw std::invalid_argument("select_counters: z out of [1,8]");
    if (rows.size() < 2) throw std::invalid_argument("select_counters: need at least 2 rows");

    std::array<double, kEventCount> column_variance{};
    for (std::size_t c = 0; c < kEventCount; ++c) {
        std::vector<double> col(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][c];
        column_variance[c] = variance(col);
    }

    CounterSelection selection;
    selection.method = method;

    switch (method) {
        case SelectionMethod::PCA: {
            std::vector<std::vector<double>> data(rows.size(), std::vector<double>(kEventCount));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                for (std::size_t c = 0; c < kEventCount; ++c) data[r][c] = rows[r][c];
            }
            const PcaResult result = pca(data, 1);
            for (std::size_t c = 0; c < kEventCount; ++c) {
                selection.scores[c] = std::abs(result.components[0][c]);
            }
            break;
        }
        case SelectionMethod::MAX_STD:
            for (std::size_t c = 0; c < kEventCount; ++c) {
                selection.scores[c] = std::sqrt(column_variance[c]);
            }
            break;
        case SelectionMethod::MAX_VAR:
            for (std::size_t c = 0; c < kEventCount; ++c) {
                selection.scores[c] = column_variance[c];
            }
            break;
        case SelectionMethod::FISHER: {
            if (labels == nullptr || labels->size() != rows.size()) {
                throw std::invalid_argument("select_counters: FISHER requires row labels");
            }
            std::vector<std::size_t> class_a, class_b;
            const int first = labels->front();
            for (std::size_t r = 0; r < rows.size(); ++r) {
                ((*labels)[r] == first ? class_a : class_b).push_back(r);
            }
            if (class_b.empty()) {
                throw std::invalid_argument("select_counters: FISHER needs two classes");
            }
            auto column_of = [&](const std::vector<std::size_t>& idx, std::size_t c) {
                std::vector<double> col;
                col.reserve(idx.size());
                for (std::size_t r : idx) col.push_back(rows[r][c]);
                return col;
            };
            for (std::size_t c = 0; c < kEventCount; ++c) {
                const auto a = column_of(class_a, c);
                const auto b = column_of(class_b, c);
                const double gap = mean(a) - mean(b);
                const double denom = variance(a) + variance(b);
                selection.scores[c] = denom > 0 ? gap * gap / denom : 0.0;
            }
            break;
        }
    }

    // Rank by score; ties by higher variance, then ordinal.
    std::vector<std::size_t> order(kEventCount);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (selection.scores[a] != selection.scores[b]) {
            return selection.scores[a] > selection.scores[b];
        }
        if (column_variance[a] != column_variance[b]) {
            return column_variance[a] > column_variance[b];
        }
        return a < b;
    });
    for (std::size_t i = 0; i < z; ++i) {
        selection.chosen.push_back(static_cast<EventKind>(order[i]));
    }
    return selection;
}

}  // namespace csign
