#include <gtest/gtest.h>

#include "adf/error.hpp"
#include "adf/geometry.hpp"
#include "adf/isat.hpp"
#include "adf/tree.hpp"
#include "helpers.hpp"

namespace adf {
namespace {

using testing::batch_of;
using testing::make_schema;
using testing::rec;

Aabb box(std::vector<double> lo, std::vector<double> hi) {
  Aabb b;
  for (std::size_t i = 0; i < lo.size(); ++i) b.attrs.push_back(i);
  b.lower = std::move(lo);
  b.upper = std::move(hi);
  return b;
}

TEST(AabbOfRecords, Examples) {
  auto s = make_schema(2, {"a"});
  Batch one = batch_of(s, {rec({3, 7}, 0)});
  EXPECT_EQ(aabb_of_records(one.records, *s), box({3, 7}, {3, 7}));
  Batch two = batch_of(s, {rec({0, 0}, 0), rec({2, 5}, 0)});
  EXPECT_EQ(aabb_of_records(two.records, *s), box({0, 0}, {2, 5}));
  Batch three = batch_of(s, {rec({1, 9}, 0), rec({4, 2}, 0), rec({3, 3}, 0)});
  EXPECT_EQ(aabb_of_records(three.records, *s), box({1, 2}, {4, 9}));
}

TEST(AabbOfRecords, SkipsCategoricalAndMissing) {
  auto s = make_schema(1, {"a"}, {{"u", "v"}});
  Batch b = batch_of(s, {rec({kMissing, 1}, 0), rec({4, 0}, 0), rec({-1, 1}, 0)});
  const Aabb bx = aabb_of_records(b.records, *s);
  EXPECT_EQ(bx.attrs, (std::vector<std::size_t>{0}));
  EXPECT_EQ(bx.lower, (std::vector<double>{-1}));
  EXPECT_EQ(bx.upper, (std::vector<double>{4}));
}

TEST(AabbOfRecords, EmptyOrDegenerateIsDataError) {
  auto s = make_schema(1, {"a"});
  EXPECT_THROW(aabb_of_records(std::span<const Record>{}, *s), DataError);
  Batch b = batch_of(s, {rec({kMissing}, 0)});
  EXPECT_THROW(aabb_of_records(b.records, *s), DataError);
}

TEST(AabbOfTree, GrowsWithAbsorbedBatches) {
  auto s = make_schema(1, {"a", "b"});
  Batch first = batch_of(s, {rec({0}, 0), rec({2}, 1)});
  AttrSampler all(*s);
  DecisionTree t = induce_tree(first, {1, 5, 0, 1}, all);
  EXPECT_EQ(aabb_of_tree(t), box({0}, {2}));
  Batch second = batch_of(s, {rec({5}, 0), rec({7}, 1)});
  t.absorb_bounds(aabb_of_records(second.records, *s));
  EXPECT_EQ(aabb_of_tree(t), box({0}, {7}));
  Batch point = batch_of(s, {rec({4}, 0)});
  EXPECT_EQ(aabb_of_tree(induce_tree(point, {1, 5, 0, 1}, all)), box({4}, {4}));
}

TEST(SatSplit, Examples) {
  auto r = sat_split(box({0}, {2}), box({5}, {7}));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->attr, 0u);
  EXPECT_DOUBLE_EQ(r->value, 3.5);
  EXPECT_EQ(r->new_side, Side::Right);

  r = sat_split(box({5}, {7}), box({0}, {2}));
  ASSERT_TRUE(r);
  EXPECT_DOUBLE_EQ(r->value, 3.5);
  EXPECT_EQ(r->new_side, Side::Left);

  EXPECT_FALSE(sat_split(box({0}, {5}), box({3}, {8})));

  r = sat_split(box({0, 0}, {2, 9}), box({5, 0}, {7, 9}));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->attr, 0u);
}

TEST(SatSplit, MismatchedAxesRejected) {
  Aabb a = box({0}, {1});
  Aabb b = box({0}, {1});
  b.attrs = {3};
  EXPECT_THROW(sat_split(a, b), InvalidInput);
}

TEST(SatSplit, SoundOnRandomBoxes) {
  Rng rng(17);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t dims = 1 + uniform_index(rng, 4);
    Aabb a = box({}, {}), b = box({}, {});
    for (std::size_t j = 0; j < dims; ++j) {
      a.attrs.push_back(j);
      b.attrs.push_back(j);
      double p = u(rng), q = u(rng), r = u(rng), t = u(rng);
      a.lower.push_back(std::min(p, q));
      a.upper.push_back(std::max(p, q));
      b.lower.push_back(std::min(r, t));
      b.upper.push_back(std::max(r, t));
    }
    const auto split = sat_split(a, b);
    EXPECT_EQ(split.has_value(), !a.overlaps(b));
    if (!split) continue;
    const double v = split->value;
    // the boxes' extreme corners on the split axis decide soundness
    const bool old_left = split->new_side == Side::Right;
    EXPECT_EQ(a.upper[split->attr] <= v, old_left);
    EXPECT_EQ(a.lower[split->attr] <= v, old_left);
    EXPECT_EQ(b.upper[split->attr] <= v, !old_left);
    EXPECT_EQ(b.lower[split->attr] <= v, !old_left);
  }
}

TEST(SatSplit, AdjacentFloatsStaySeparated) {
  const double lo = 1.0, hi = std::nextafter(1.0, 2.0);
  const auto r = sat_split(box({0}, {lo}), box({hi}, {5}));
  ASSERT_TRUE(r);
  EXPECT_TRUE(lo <= r->value);
  EXPECT_FALSE(hi <= r->value);
}

DecisionTree two_leaf_tree(SchemaPtr s, std::vector<Record> records) {
  Batch b = batch_of(s, std::move(records));
  AttrSampler all(*s);
  return induce_tree(b, {1, 5, 0, 1}, all);
}

TEST(IsatExpand, DisjointAddsSatRoot) {
  auto s = make_schema(1, {"a", "b"});
  DecisionTree t = two_leaf_tree(s, {rec({0}, 0), rec({0.5}, 0), rec({1.5}, 1), rec({2}, 1)});
  Batch nb = batch_of(s, {rec({5}, 1), rec({7}, 1)});
  const IsatResult r = isat_expand(t, nb);
  EXPECT_EQ(r.outcome, IsatOutcome::Disjoint);
  ASSERT_EQ(r.fresh_leaves.size(), 1u);
  const Node& root = r.tree.node(0);
  EXPECT_DOUBLE_EQ(root.test.value, 3.5);
  EXPECT_EQ(r.tree.node(root.right).leaf_id, r.fresh_leaves[0]);
  EXPECT_EQ(r.tree.leaf(r.fresh_leaves[0]).majority, 1u);
  EXPECT_EQ(r.tree.leaf_count(), 3u);
}

TEST(IsatExpand, OverlapSplitsAtOldUpperBound) {
  auto s = make_schema(1, {"a", "b"});
  DecisionTree t = two_leaf_tree(s, {rec({0}, 0), rec({1}, 0), rec({4}, 1), rec({5}, 1)});
  Batch nb = batch_of(s, {rec({3}, 0), rec({5}, 1), rec({6}, 0), rec({8}, 0)});
  const IsatResult r = isat_expand(t, nb);
  EXPECT_EQ(r.outcome, IsatOutcome::Overlap);
  ASSERT_EQ(r.fresh_leaves.size(), 1u);
  const Node& root = r.tree.node(0);
  EXPECT_DOUBLE_EQ(root.test.value, 5.0);
  EXPECT_EQ(r.tree.node(root.right).leaf_id, r.fresh_leaves[0]);
  EXPECT_EQ(r.tree.route(rec({6}, 0)), r.fresh_leaves[0]);
  EXPECT_NE(r.tree.route(rec({5}, 0)), r.fresh_leaves[0]);
  EXPECT_EQ(r.tree.leaf(r.fresh_leaves[0]).majority, 0u);
}

TEST(IsatExpand, OverlapBothDirectionsWrapsInOrder) {
  auto s = make_schema(1, {"a", "b"});
  DecisionTree t = two_leaf_tree(s, {rec({2}, 0), rec({3}, 0), rec({4}, 1), rec({5}, 1)});
  Batch nb = batch_of(s, {rec({0}, 1), rec({3}, 0), rec({8}, 0)});
  const IsatResult r = isat_expand(t, nb);
  EXPECT_EQ(r.outcome, IsatOutcome::Overlap);
  ASSERT_EQ(r.fresh_leaves.size(), 2u);
  EXPECT_EQ(r.tree.route(rec({8}, 0)), r.fresh_leaves[0]);
  EXPECT_EQ(r.tree.route(rec({0}, 0)), r.fresh_leaves[1]);
  EXPECT_EQ(r.tree.leaf(r.fresh_leaves[1]).majority, 1u);
  // the lower-bound test is the outer root
  EXPECT_EQ(r.tree.node(r.tree.node(0).left).leaf_id, r.fresh_leaves[1]);
  EXPECT_EQ(r.tree.route(rec({2}, 0)), t.route(rec({2}, 0)));  // boundary record keeps its leaf
}

TEST(IsatExpand, ContainedBatchLeavesTreeUnchanged) {
  auto s = make_schema(1, {"a", "b"});
  DecisionTree t = two_leaf_tree(s, {rec({0}, 0), rec({1}, 0), rec({9}, 1), rec({10}, 1)});
  Batch nb = batch_of(s, {rec({3}, 0), rec({6}, 1)});
  const IsatResult r = isat_expand(t, nb);
  EXPECT_EQ(r.outcome, IsatOutcome::FullyContained);
  EXPECT_TRUE(r.fresh_leaves.empty());
  EXPECT_TRUE(r.tree == t);
}

TEST(IsatExpand, PreservesRoutingOfOldRegion) {
  auto s = make_schema(3, {"a", "b", "c"});
  Rng rng(23);
  AttrSampler all(*s);
  auto rule = [](const std::vector<double>& v) { return static_cast<ClassId>((v[0] > 0) + (v[1] > 2)); };
  for (int trial = 0; trial < 100; ++trial) {
    Batch old = testing::random_batch(s, 80, -5, 5, rng, rule);
    DecisionTree t = induce_tree(old, {3, 6, 0, 1}, all);
    const double shift = std::uniform_real_distribution<double>(-12, 12)(rng);
    Batch nb = testing::random_batch(s, 60, -5 + shift, 5 + shift * 0.5, rng, rule);
    for (auto strategy : {0, 1}) {
      const IsatResult r = strategy == 0 ? isat_expand(t, nb) : sat_expand(t, nb);
      for (const auto& rec_old : old.records) {
        EXPECT_EQ(r.tree.route(rec_old), t.route(rec_old));
      }
      for (LeafId id : t.leaf_ids()) EXPECT_TRUE(r.tree.has_leaf(id));
      // records outside the old box never land in old leaves when a SAT root exists
      if (r.outcome == IsatOutcome::Disjoint) {
        for (const auto& rn : nb.records) EXPECT_EQ(r.tree.route(rn), r.fresh_leaves[0]);
      }
    }
  }
}

TEST(SatExpand, OverlapIsLeftToEntropyRepair) {
  auto s = make_schema(1, {"a", "b"});
  DecisionTree t = two_leaf_tree(s, {rec({0}, 0), rec({1}, 0), rec({4}, 1), rec({5}, 1)});
  Batch nb = batch_of(s, {rec({3}, 0), rec({8}, 0)});
  EXPECT_EQ(sat_expand(t, nb).outcome, IsatOutcome::FullyContained);
}

}  // namespace
}  // namespace adf
