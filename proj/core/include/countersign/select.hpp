#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "countersign/events.hpp"

namespace csign {

enum class SelectionMethod : std::uint8_t { PCA = 0, MAX_STD = 1, MAX_VAR = 2, FISHER = 3 };

std::string to_string(SelectionMethod method);
SelectionMethod selection_method_from_string(const std::string& name);

struct CounterSelection {
    SelectionMethod method = SelectionMethod::PCA;
    std::vector<EventKind> chosen;                 // ordered, best first
    std::array<double, kEventCount> scores{};      // per-counter diagnostics
};

/// Ranks the eight counters over rows of per-event values and returns the
/// top z. PCA ranks by |loading| on the first principal component (ties:
/// higher variance, then ordinal); MAX_STD / MAX_VAR rank by spread;
/// FISHER needs the two-class labels and scores (mu1-mu2)^2/(s1^2+s2^2).
CounterSelection select_counters(const std::vector<std::array<double, kEventCount>>& rows,
                                 SelectionMethod method, std::size_t z,
                                 const std::vector<int>* labels = nullptr);

}  // namespace csign
