#include "ldknn/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ldknn {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("distance: vectors of length " + std::to_string(a.size()) +
                                " and " + std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    sum += diff * diff;
  }
  return sum;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

std::vector<std::span<const double>> NeighborhoodPartition::points(const Dataset& train,
                                                                   ClassIndex c) const {
  std::vector<std::span<const double>> out;
  out.reserve(per_class[c].size());
  for (const Neighbor& n : per_class[c]) out.push_back(train.row(n.index));
  return out;
}

namespace {

struct Candidate {
  double sq;
  std::size_t index;
};

bool closer(const Candidate& a, const Candidate& b) {
  return a.sq < b.sq || (a.sq == b.sq && a.index < b.index);
}

// Squared distance of the k-th nearest candidate, then every candidate within
// it, sorted. Selection is linear (nth_element); only the admitted set is
// sorted.
std::vector<Candidate> nearest_with_ties(std::vector<Candidate> cands, std::size_t k) {
  auto kth = cands.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(cands.begin(), kth, cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.sq < b.sq; });
  const double cutoff = kth->sq;
  auto end = std::partition(cands.begin(), cands.end(),
                            [cutoff](const Candidate& c) { return c.sq <= cutoff; });
  cands.erase(end, cands.end());
  std::sort(cands.begin(), cands.end(), closer);
  return cands;
}

void check_query(const Dataset& train, std::span<const double> query) {
  if (query.size() != train.dims()) {
    throw std::invalid_argument("query has " + std::to_string(query.size()) +
                                " dimensions, training set has " + std::to_string(train.dims()));
  }
}

}  // namespace

NeighborhoodPartition knn_partition(const Dataset& train, std::span<const double> query,
                                    std::size_t k) {
  check_query(train, query);
  if (k < 1 || k > train.size()) {
    throw std::invalid_argument("knn_partition: k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(train.size()) + "]");
  }
  std::vector<Candidate> cands(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    cands[i] = {squared_distance(train.row(i), query), i};
  }
  const auto admitted = nearest_with_ties(std::move(cands), k);

  NeighborhoodPartition part;
  part.query.assign(query.begin(), query.end());
  part.k_requested = k;
  part.per_class.resize(train.n_classes());
  part.neighbors.reserve(admitted.size());
  for (const Candidate& c : admitted) {
    const Neighbor n{c.index, train.labels[c.index], std::sqrt(c.sq)};
    part.neighbors.push_back(n);
    part.per_class[n.label].push_back(n);
  }
  part.radius = part.neighbors.back().distance;
  return part;
}

NeighborhoodPartition knn_per_class(const Dataset& train, std::span<const double> query,
                                    std::size_t k) {
  check_query(train, query);
  const auto members = train.class_members();
  if (k < 1) throw std::invalid_argument("knn_per_class: k must be >= 1");
  for (ClassIndex c = 0; c < members.size(); ++c) {
    if (k > members[c].size()) {
      throw std::invalid_argument("knn_per_class: k=" + std::to_string(k) + " exceeds the " +
                                  std::to_string(members[c].size()) + " samples of class '" +
                                  train.class_set[c] + "'");
    }
  }

  NeighborhoodPartition part;
  part.query.assign(query.begin(), query.end());
  part.k_requested = k;
  part.per_class.resize(train.n_classes());
  std::vector<Candidate> cands;
  for (ClassIndex c = 0; c < members.size(); ++c) {
    cands.clear();
    for (std::size_t i : members[c]) cands.push_back({squared_distance(train.row(i), query), i});
    for (const Candidate& a : nearest_with_ties(cands, k)) {
      const Neighbor n{a.index, c, std::sqrt(a.sq)};
      part.per_class[c].push_back(n);
      part.neighbors.push_back(n);
    }
  }
  std::sort(part.neighbors.begin(), part.neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  });
  part.radius = part.neighbors.back().distance;
  return part;
}

}  // namespace ldknn
