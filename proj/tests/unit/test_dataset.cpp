#include <gtest/gtest.h>

#include <sstream>

#include "adf/dataset.hpp"
#include "adf/error.hpp"
#include "helpers.hpp"

namespace adf {
namespace {

TEST(InferSchema, NumericAndCategoricalColumns) {
  const Schema s = infer_schema({"a", "b", "cls"}, {{"1.0", "x", "yes"}, {"2.5", "y", "no"}}, std::string("cls"));
  EXPECT_EQ(s.attribute(0).kind, AttributeKind::Numeric);
  EXPECT_EQ(s.attribute(1).kind, AttributeKind::Categorical);
  EXPECT_EQ(s.class_index(), 2u);
  EXPECT_EQ(s.class_values(), (std::vector<std::string>{"yes", "no"}));
}

TEST(InferSchema, MissingMarkerIgnored) {
  const Schema s = infer_schema({"a", "cls"}, {{"1", "p"}, {"?", "q"}}, {});
  EXPECT_EQ(s.attribute(0).kind, AttributeKind::Numeric);
}

TEST(InferSchema, AnyTextForcesCategorical) {
  const Schema s = infer_schema({"a", "cls"}, {{"1", "yes"}, {"oops", "no"}}, std::string("cls"));
  EXPECT_EQ(s.attribute(0).kind, AttributeKind::Categorical);
}

TEST(InferSchema, EmptySampleIsDataError) {
  EXPECT_THROW(infer_schema({"a", "cls"}, {}, {}), DataError);
}

TEST(InferSchema, UnknownClassColumnIsConfigError) {
  EXPECT_THROW(infer_schema({"a", "cls"}, {{"1", "y"}}, std::string("nope")), ConfigError);
  EXPECT_THROW(infer_schema({"a", "cls"}, {{"1", "y"}}, std::size_t{5}), ConfigError);
}

TEST(ReadCsv, ThreeRowsTwoLabelsAndMissing) {
  std::istringstream in("x,c,label\n1.5,red,a\n?,blue,b\n3,red,a\n");
  const Batch b = read_csv(in);
  ASSERT_EQ(b.records.size(), 3u);
  EXPECT_EQ(b.schema->class_values(), (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(is_missing(b.records[1].values[0]));
  EXPECT_DOUBLE_EQ(b.records[2].values[0], 3.0);
  EXPECT_EQ(b.records[1].values[1], 1.0);  // "blue" is the second category seen
  EXPECT_EQ(*b.records[1].label, 1u);
}

TEST(ReadCsv, RaggedRowNamesLine) {
  std::istringstream in("x,label\n1,a\n2\n");
  try {
    read_csv(in);
    FAIL() << "expected a parse error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ReadCsv, BaseSchemaIsExtendedNotRenumbered) {
  std::istringstream first("x,c,label\n1,red,a\n2,blue,b\n");
  const Batch b1 = read_csv(first);
  std::istringstream second("x,c,label\n5,green,c\n6,red,a\n");
  const Batch b2 = read_csv(second, {}, b1.schema.get());
  EXPECT_TRUE(b2.schema->extends(*b1.schema));
  EXPECT_EQ(b2.schema->class_values(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(*b2.records[1].label, 0u);
  EXPECT_EQ(b2.records[0].values[1], 2.0);
}

TEST(WriteCsv, RoundTripsValuesExactly) {
  auto schema = testing::make_schema(2, {"p", "q"}, {{"u", "v"}});
  Batch b = testing::batch_of(schema, {testing::rec({0.1, 1.0 / 3.0, 1}, 1), testing::rec({kMissing, -2.5e-7, 0}, 0)});
  std::ostringstream out;
  write_csv(b, out);
  std::istringstream in(out.str());
  const Batch back = read_csv(in);
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_EQ(back.records[0].values[0], 0.1);
  EXPECT_EQ(back.records[0].values[1], 1.0 / 3.0);
  EXPECT_TRUE(is_missing(back.records[1].values[0]));
  EXPECT_EQ(back.records[1].values[1], -2.5e-7);
  EXPECT_EQ(back.schema->class_name(*back.records[0].label), "q");
}

TEST(SplitCsvLine, QuotedFields) {
  EXPECT_EQ(split_csv_line(R"(a,"b,c","d""e")", ','), (std::vector<std::string>{"a", "b,c", "d\"e"}));
}

TEST(ClassScenario, Taxonomy) {
  EXPECT_EQ(class_scenario({0}, {0, 1}), Scenario::SKC);
  EXPECT_EQ(class_scenario({0, 1}, {0, 1}), Scenario::MKC);
  EXPECT_EQ(class_scenario({2}, {0, 1}), Scenario::SUC);
  EXPECT_EQ(class_scenario({2, 3}, {0, 1}), Scenario::MUC);
  EXPECT_EQ(class_scenario({0, 2}, {0, 1}), Scenario::MKUC);
  EXPECT_THROW(class_scenario({}, {0}), InvalidInput);
}

TEST(ClassScenario, NamesRoundTrip) {
  for (Scenario s : {Scenario::SKC, Scenario::MKC, Scenario::SUC, Scenario::MUC, Scenario::MKUC}) {
    EXPECT_EQ(scenario_from_string(to_string(s)), s);
  }
}

TEST(Batch, ConcatKeepsOrderAndLatestSchema) {
  auto s1 = testing::make_schema(1, {"a"});
  auto s2 = std::make_shared<const Schema>(s1->with_class("b"));
  std::vector<Batch> parts{testing::batch_of(s1, {testing::rec({1}, 0)}, 1),
                           testing::batch_of(s2, {testing::rec({2}, 1), testing::rec({3}, 0)}, 2)};
  const Batch all = concat(parts, 9);
  ASSERT_EQ(all.records.size(), 3u);
  EXPECT_EQ(all.records[2].values[0], 3.0);
  EXPECT_EQ(all.schema->class_count(), 2u);
  EXPECT_EQ(all.batch_id, 9);
  EXPECT_EQ(all.class_histogram(), (std::vector<Count>{2, 1}));
}

TEST(Schema, DigestChangesWithCategories) {
  auto s = testing::make_schema(1, {"a"});
  EXPECT_EQ(s->digest(), testing::make_schema(1, {"a"})->digest());
  EXPECT_NE(s->digest(), s->with_class("b").digest());
}

}  // namespace
}  // namespace adf
