#include "ldknn/metrics.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace ldknn {

namespace {

void check_lists(std::size_t predicted, std::size_t actual) {
  if (predicted != actual) {
    throw std::invalid_argument("metric: " + std::to_string(predicted) + " predictions for " +
                                std::to_string(actual) + " labels");
  }
  if (actual == 0) throw std::invalid_argument("metric: empty label lists");
}

}  // namespace

double misclassification_rate(std::span<const ClassIndex> predicted,
                              std::span<const ClassIndex> actual) {
  check_lists(predicted.size(), actual.size());
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) wrong += predicted[i] != actual[i];
  return static_cast<double>(wrong) / static_cast<double>(actual.size());
}

double macro_f1(std::span<const ClassIndex> predicted, std::span<const ClassIndex> actual,
                std::size_t n_classes) {
  check_lists(predicted.size(), actual.size());
  if (n_classes == 0) throw std::invalid_argument("macro_f1: no classes");
  std::vector<std::size_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (predicted[i] >= n_classes || actual[i] >= n_classes) {
      throw std::invalid_argument("macro_f1: class index out of range");
    }
    if (predicted[i] == actual[i]) {
      ++tp[actual[i]];
    } else {
      ++fp[predicted[i]];
      ++fn[actual[i]];
    }
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    // 2PR/(P+R) == 2TP / (2TP + FP + FN); zero when TP == 0.
    const std::size_t denom = 2 * tp[c] + fp[c] + fn[c];
    if (tp[c] > 0) sum += 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
  }
  return sum / static_cast<double>(n_classes);
}

}  // namespace ldknn
