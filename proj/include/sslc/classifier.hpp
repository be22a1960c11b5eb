#pragma once

// Majority vote per region. Z^k = sum_i (2 Y_i - 1) 1{X_i in region k} and
// region k gets label 1{Z^k > 0}; cells outside every region are rejected.

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sslc/components.hpp"
#include "sslc/distribution.hpp"
#include "sslc/grid.hpp"

namespace sslc {

enum class Label : std::uint8_t { zero = 0, one = 1, reject = 2 };

inline const char* label_str(Label l) {
  switch (l) {
    case Label::zero: return "0";
    case Label::one: return "1";
    case Label::reject: return "R";
  }
  return "?";
}

inline Label parse_label(const std::string& s) {
  if (s == "0") return Label::zero;
  if (s == "1") return Label::one;
  if (s == "R") return Label::reject;
  throw std::invalid_argument("unknown label '" + s + "'");
}

enum class VoteMode { population, semi_supervised };

struct ClusterVoteModel {
  RegionLabeling regions;
  std::vector<long> votes;         // Z^k
  std::vector<std::size_t> counts;  // labeled points per region
  std::vector<Label> region_label;
  VoteMode mode = VoteMode::semi_supervised;

  const GridDomain& domain() const { return regions.domain(); }
};

namespace detail {

inline ClusterVoteModel vote(const RegionLabeling& regions, const LabeledSample& sample,
                             VoteMode mode) {
  if (sample.points.size() != sample.labels.size())
    throw std::invalid_argument("fit: points/labels size mismatch");
  ClusterVoteModel model;
  model.regions = regions;
  model.mode = mode;
  const std::size_t K = regions.num_regions();
  model.votes.assign(K, 0);
  model.counts.assign(K, 0);
  const GridDomain& dom = regions.domain();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto cell = dom.cell_of(sample.points[i]);
    if (!cell)
      throw std::invalid_argument("fit: labeled point " + std::to_string(i) +
                                  " lies outside the domain");
    const int y = sample.labels[i];
    if (y != 0 && y != 1)
      throw std::invalid_argument("fit: label of point " + std::to_string(i) + " is not 0/1");
    const int k = regions.region_of_cell(*cell);
    if (k < 0) continue;  // outside every region: no vote
    model.votes[k] += 2 * y - 1;
    ++model.counts[k];
  }
  model.region_label.resize(K);
  for (std::size_t k = 0; k < K; ++k)
    model.region_label[k] = model.votes[k] > 0 ? Label::one : Label::zero;
  return model;
}

}  // namespace detail

// Semi-supervised classifier on estimated homogeneous regions.
inline ClusterVoteModel fit(const RegionLabeling& regions, const LabeledSample& sample) {
  return detail::vote(regions, sample, VoteMode::semi_supervised);
}

// Population classifier: the same vote on the true components of the level set.
inline ClusterVoteModel fit_population(const RegionLabeling& true_components,
                                       const LabeledSample& sample) {
  return detail::vote(true_components, sample, VoteMode::population);
}

inline Label predict_cell(const ClusterVoteModel& model, CellIndex c) {
  const int k = model.regions.region_of_cell(c);
  return k < 0 ? Label::reject : model.region_label[k];
}

inline Label predict(const ClusterVoteModel& model, const Point& x) {
  const auto cell = model.domain().cell_of(x);
  if (!cell) throw std::invalid_argument("predict: point outside the domain");
  return predict_cell(model, *cell);
}

// Label of every grid cell.
inline std::vector<Label> predict_cells(const ClusterVoteModel& model) {
  std::vector<Label> out(model.domain().num_cells());
  for (CellIndex c = 0; c < out.size(); ++c) out[c] = predict_cell(model, c);
  return out;
}

// region,label,votes,count
inline void write_model_csv(std::ostream& os, const ClusterVoteModel& m) {
  os << "region,label,votes,count\n";
  for (std::size_t k = 0; k < m.region_label.size(); ++k)
    os << k << ',' << label_str(m.region_label[k]) << ',' << m.votes[k] << ',' << m.counts[k]
       << '\n';
}

}  // namespace sslc
