#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ldknn/data.hpp"

namespace ldknn {

double euclidean_distance(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

struct Neighbor {
  std::size_t index;  // row in the training set
  ClassIndex label;
  double distance;
};

/// A query's neighborhood grouped by class.
///
/// `neighbors` holds every training sample at distance <= radius, sorted by
/// (distance, index). Ties at the radius are all admitted, so size() can
/// exceed k_requested. `per_class[c]` is the class-c subsequence of
/// `neighbors`, in the same order; classes with no neighbors have an empty
/// list.
struct NeighborhoodPartition {
  std::vector<double> query;
  std::vector<Neighbor> neighbors;
  std::vector<std::vector<Neighbor>> per_class;
  std::size_t k_requested = 0;
  double radius = 0.0;

  std::size_t size() const noexcept { return neighbors.size(); }
  std::size_t count(ClassIndex c) const { return per_class[c].size(); }

  /// Feature rows of class c's neighbors, nearest first.
  std::vector<std::span<const double>> points(const Dataset& train, ClassIndex c) const;
};

/// Exhaustive k-nearest-neighbor search over `train` with tie inclusion at
/// the k-th distance.
NeighborhoodPartition knn_partition(const Dataset& train, std::span<const double> query,
                                    std::size_t k);

/// Balanced neighborhood: the k nearest members of every class, each class
/// with its own radius-tie inclusion. `radius` is the largest per-class
/// radius.
NeighborhoodPartition knn_per_class(const Dataset& train, std::span<const double> query,
                                    std::size_t k);

}  // namespace ldknn
