#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sslc/classifier.hpp"
#include "sslc/config.hpp"
#include "sslc/oracle.hpp"

using namespace sslc;

namespace {

// Two 1-D regions: cells [2,5) and [10,14) of a 20-cell unit interval.
RegionLabeling two_intervals() {
  const auto dom = GridDomain::unit(1, 20);
  GridSet s(dom);
  for (CellIndex c : {2, 3, 4, 10, 11, 12, 13}) s.insert(c);
  return merge_regions(connected_components(s), 0.1);
}

Point at(double x) { return {x, 0, 0}; }

LabeledSample make_sample(std::vector<double> xs, std::vector<int> ys) {
  LabeledSample s;
  for (double x : xs) s.points.push_back(at(x));
  s.labels = std::move(ys);
  return s;
}

}  // namespace

TEST(Vote, MajorityAndTie) {
  const auto regions = two_intervals();
  ASSERT_EQ(regions.num_regions(), 2u);
  // region 0 gets {1,1,1,0}; region 1 gets {1,0}
  const auto model = fit(regions, make_sample({0.12, 0.17, 0.22, 0.13, 0.52, 0.61}, {1, 1, 1, 0, 1, 0}));
  EXPECT_EQ(model.votes[0], 2);
  EXPECT_EQ(model.region_label[0], Label::one);
  EXPECT_EQ(model.votes[1], 0);
  EXPECT_EQ(model.region_label[1], Label::zero);  // Z = 0 gives 0
  EXPECT_EQ(model.counts[0], 4u);
  EXPECT_EQ(model.counts[1], 2u);
}

TEST(Vote, EmptyRegionAndUnanimous) {
  const auto regions = two_intervals();
  const auto model = fit_population(regions, make_sample({0.11, 0.21}, {1, 1}));
  EXPECT_EQ(model.region_label[0], Label::one);
  EXPECT_EQ(model.counts[1], 0u);
  EXPECT_EQ(model.votes[1], 0);
  EXPECT_EQ(model.region_label[1], Label::zero);
  EXPECT_EQ(model.mode, VoteMode::population);
}

TEST(Vote, InputErrors) {
  const auto regions = two_intervals();
  EXPECT_THROW(fit(regions, make_sample({0.1}, {2})), std::invalid_argument);
  EXPECT_THROW(fit(regions, make_sample({1.5}, {1})), std::invalid_argument);
  EXPECT_THROW(fit(regions, make_sample({0.1, 0.2}, {1})), std::invalid_argument);
}

TEST(Vote, MatchesBruteForceMembershipSum) {
  const auto d = shipped_oracle("two_bump");
  const auto v = make_oracle_view(d, d.lambda_star, 64);
  Rng rng(41);
  const auto sample = d.sample_labeled(500, rng);
  const auto model = fit_population(v.truth, sample);
  for (std::size_t k = 0; k < v.truth.num_regions(); ++k) {
    const GridSet region = v.truth.region_set(k);
    long z = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const CellIndex c = *v.domain.cell_of(sample.points[i]);
      if (!region.contains(c)) continue;
      z += 2 * sample.labels[i] - 1;
      ++n;
    }
    EXPECT_EQ(model.votes[k], z);
    EXPECT_EQ(model.counts[k], n);
  }
}

TEST(Predict, LookupAndReject) {
  const auto regions = two_intervals();
  const auto model = fit(regions, make_sample({0.12, 0.52}, {1, 0}));
  EXPECT_EQ(predict(model, at(0.17)), Label::one);
  EXPECT_EQ(predict(model, at(0.62)), Label::zero);
  EXPECT_EQ(predict(model, at(0.35)), Label::reject);
  EXPECT_EQ(predict(model, at(1.0)), Label::reject);
  EXPECT_THROW(predict(model, at(-0.01)), std::invalid_argument);
  EXPECT_STREQ(label_str(Label::reject), "R");
  for (Label l : {Label::zero, Label::one, Label::reject}) EXPECT_EQ(parse_label(label_str(l)), l);
  EXPECT_THROW(parse_label("2"), std::invalid_argument);
}

TEST(Predict, AllCellsConsistentWithRegionIds) {
  const auto d = shipped_oracle("three_bump");
  const auto v = make_oracle_view(d, d.lambda_star, 64);
  Rng rng(42);
  const auto model = fit_population(v.truth, d.sample_labeled(300, rng));
  const auto labels = predict_cells(model);
  for (CellIndex c = 0; c < v.domain.num_cells(); ++c) {
    const int k = v.truth.region_of_cell(c);
    EXPECT_EQ(labels[c], k < 0 ? Label::reject : model.region_label[k]);
    EXPECT_EQ(predict(model, v.domain.cell_center(c)), labels[c]);
  }
}

TEST(Invariance, PermutationOutsidePointsAndFlip) {
  const auto d = shipped_oracle("three_bump");
  const auto v = make_oracle_view(d, d.lambda_star, 64);
  Rng rng(43);
  const auto sample = d.sample_labeled(60, rng);
  const auto base = fit(v.truth, sample);

  LabeledSample shuffled = sample;
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.next() % (i + 1)]);
  for (std::size_t i = 0; i < order.size(); ++i) {
    shuffled.points[i] = sample.points[order[i]];
    shuffled.labels[i] = sample.labels[order[i]];
  }
  const auto perm = fit(v.truth, shuffled);
  EXPECT_EQ(perm.votes, base.votes);
  EXPECT_EQ(predict_cells(perm), predict_cells(base));

  LabeledSample extra = sample;
  CellIndex outside = 0;
  while (v.gamma.contains(outside)) ++outside;
  extra.points.push_back(v.domain.cell_center(outside));
  extra.labels.push_back(1);
  EXPECT_EQ(fit(v.truth, extra).votes, base.votes);

  LabeledSample flipped = sample;
  for (int& y : flipped.labels) y = 1 - y;
  const auto flip = fit(v.truth, flipped);
  for (std::size_t k = 0; k < base.votes.size(); ++k) {
    EXPECT_EQ(flip.votes[k], -base.votes[k]);
    if (base.votes[k] == 0)
      EXPECT_EQ(flip.region_label[k], Label::zero);  // ties stay 0 both ways
    else
      EXPECT_NE(flip.region_label[k], base.region_label[k]);
  }
}

// eta = 0.9 on a single component; the misvote frequency of the population
// vote stays under the per-component Hoeffding bound 2 exp(-n delta^2 / 2).
TEST(Hoeffding, SingleComponentMisvote) {
  SyntheticDistribution d;
  d.dim = 2;
  d.background_weight = 0.6;
  d.background_eta = 0.3;
  d.bumps = {Bump{{0.5, 0.5, 0}, 0.3, 0.4, 0.9}};
  d.lambda_star = 2.0;
  d.validate();
  const auto v = make_oracle_view(d, d.lambda_star, 128);
  ASSERT_EQ(v.deltas.size(), 1u);
  const double delta = v.deltas[0];
  EXPECT_GT(delta, 0.0);
  const std::size_t n = 200;
  const auto est = misvote_frequency(d, v, n, 1000, 7);
  const double bound = 2.0 * std::exp(-n * delta * delta / 2.0);
  EXPECT_LE(est.frequency[0], bound + 3.0 * est.se[0]);
}

TEST(ModelCsv, OneRowPerRegion) {
  const auto model = fit(two_intervals(), make_sample({0.12, 0.52}, {1, 0}));
  std::ostringstream os;
  write_model_csv(os, model);
  const std::string s = os.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}
