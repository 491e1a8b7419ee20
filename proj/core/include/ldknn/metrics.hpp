#pragma once

#include <cstddef>
#include <span>

#include "ldknn/data.hpp"

namespace ldknn {

/// Fraction of positions where predicted != actual.
double misclassification_rate(std::span<const ClassIndex> predicted,
                              std::span<const ClassIndex> actual);

/// Unweighted mean over all n_classes of the per-class F1 = 2PR / (P + R).
/// A class with P + R = 0 (including one absent from both lists)
/// contributes 0.
double macro_f1(std::span<const ClassIndex> predicted, std::span<const ClassIndex> actual,
                std::size_t n_classes);

}  // namespace ldknn
