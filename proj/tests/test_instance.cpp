#include <gtest/gtest.h>

#include <filesystem>

#include "mkdual/scenario.hpp"
#include "support.hpp"

namespace mkdual {
namespace {

using Q = Rational;
namespace fs = std::filesystem;

const fs::path kInstances = MKDUAL_INSTANCE_DIR;
const fs::path kData = MKDUAL_TEST_DATA_DIR;

template <class E>
std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  return "<no exception>";
}

TEST(LoadInstanceTest, MinimalOneByOne) {
  auto inst = std::get<Instance<Q>>(load_instance(kInstances / "minimal_1x1.json"));
  EXPECT_EQ(inst.nx(), 1u);
  EXPECT_EQ(inst.cost().values(0, 0), 7);
}

TEST(LoadInstanceTest, WeightsNotSummingToOneNameTheDefect) {
  auto what = message_of<ValidationError>([] { load_instance(kData / "bad_weights.json"); });
  EXPECT_NE(what.find("space_x"), std::string::npos) << what;
  EXPECT_NE(what.find("1/10"), std::string::npos) << what;
}

TEST(LoadInstanceTest, DimensionMismatch) {
  auto what = message_of<ValidationError>([] { load_instance(kData / "bad_dimensions.json"); });
  EXPECT_NE(what.find("cost.matrix"), std::string::npos) << what;
}

TEST(LoadInstanceTest, ParseErrorsCarryLineOrField) {
  try {
    load_instance(kData / "bad_syntax.json");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "line 4");
  }
  try {
    parse_instance(R"({"space_x": {"weights": ["1/1"]}, "space_y": {"weights": ["x"]}, "cost": {"matrix": [["0"]]}})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "space_y.weights[0]");
  }
  try {
    parse_instance(R"({"space_x": {"weights": [0.5, 0.5]}, "space_y": {"weights": [1]}, "cost": {"matrix": [[0], [1]]}})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "space_x.weights[0]");
  }
  try {
    parse_instance(R"({"space_x": {"weights": [1]}, "cost": {"matrix": [[0]]}})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "space_y");
  }
  EXPECT_THROW(parse_instance(R"({"space_x": {"weights": [1]}, "space_y": {"weights": [1]}, "cost": {"formula": "cubic"}})"),
               ParseError);
}

TEST(LoadInstanceTest, CrossReferencesAreValidated) {
  const std::string head = R"({"space_x": {"weights": ["1/2", "1/2"]}, "space_y": {"weights": ["1/1"]}, "cost": {"matrix": [["0"], ["1"]]}, )";
  EXPECT_THROW(parse_instance(head + R"("rectangles": [{"a": [2], "b": [0]}]})"), ValidationError);
  EXPECT_THROW(parse_instance(head + R"("partition": {"cells": [[0]]}})"), ValidationError);
  EXPECT_THROW(parse_instance(head + R"("partition": {"cells": [[0], [1]], "null_cell": 0}})"), ValidationError);
  EXPECT_THROW(parse_instance(head + R"("map": [0, 1]})"), ValidationError);
  EXPECT_THROW(parse_instance(head + R"("map": [0]})"), ValidationError);
  EXPECT_NO_THROW(parse_instance(head + R"("map": [0, 0], "partition": {"cells": [[1, 0]]}})"));
}

TEST(LoadInstanceTest, FormulaCostsAreSampled) {
  auto inst = std::get<Instance<Q>>(load_instance(kInstances / "line_absdiff.json"));
  EXPECT_EQ(inst.cost().values(3, 1), 1);
  EXPECT_EQ(inst.cost().values(1, 2), Q(7, 4));
  auto sq = std::get<Instance<Q>>(parse_instance(
      R"({"space_x": {"weights": ["1/1"]}, "space_y": {"weights": ["1/2", "1/2"]},
          "cost": {"formula": "squared-difference", "x": ["1/2"], "y": ["0", "3"]}})"));
  EXPECT_EQ(sq.cost().values, Matrix<Q>::from_rows({{Q(1, 4), Q(25, 4)}}));
  auto eq = std::get<Instance<Q>>(load_instance(kInstances / "standard_2x2.json"));
  EXPECT_EQ(eq.cost().values, Matrix<Q>::from_rows({{1, 0}, {0, 1}}));
  auto table = std::get<Instance<double>>(load_instance(kInstances / "float_table.json"));
  EXPECT_EQ(table.cost().values, Matrix<double>::from_rows({{0, 1}, {1, 1}, {1, 0.25}}));
}

TEST(RoundTripProperty, EveryShippedInstance) {
  int files = 0;
  for (const auto& entry : fs::directory_iterator(kInstances)) {
    if (entry.path().extension() != ".json") continue;
    ++files;
    auto first = load_instance(entry.path());
    auto second = parse_instance(to_string(first));
    EXPECT_EQ(first, second) << entry.path();
    EXPECT_EQ(to_string(first), to_string(second));
  }
  EXPECT_GE(files, 5);
}

TEST(RoundTripProperty, GeneratedInstances) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = generate_instance(seed, 1 + seed % 5, 1 + (seed / 5) % 5);
    AnyInstance back = parse_instance(to_json(inst).dump());
    EXPECT_EQ(AnyInstance(inst), back);
    auto as_float = convert_instance<double>(inst);
    EXPECT_EQ(AnyInstance(as_float), parse_instance(to_json(as_float).dump()));
  }
  EXPECT_EQ(to_json(generate_instance(5, 3, 4)), to_json(generate_instance(5, 3, 4)));
}

TEST(ScenarioTest, WassersteinTwoPoints) {
  auto r = run_scenario(load_instance(kInstances / "two_point_metric.json"), {.command = "wasserstein"});
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.document["values"]["alpha"], "1/1");
  EXPECT_EQ(r.document["values"]["beta"], "1/1");
}

TEST(ScenarioTest, SolveStandardExampleGivesChain) {
  auto r = run_scenario(load_instance(kInstances / "standard_2x2.json"), {.command = "solve"});
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.document["values"]["chain"], Json({"0/1", "0/1", "1/1", "1/1"}));
  EXPECT_EQ(r.document["values"]["monge"], "0/1");
}

TEST(ScenarioTest, OracleCheckMatchesExactly) {
  auto r = run_scenario(load_instance(kInstances / "random_3x3.json"), {.command = "oracle-check"});
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.document["values"]["match"], "exact");
}

TEST(ScenarioTest, EveryCommandPassesItsChecksOnShippedInstances) {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"solve", "random_3x3"},      {"chain", "float_table"},  {"approx", "line_absdiff"},
      {"partition", "line_absdiff"}, {"extend", "line_absdiff"}, {"cover", "float_table"},
      {"arveson", "arveson_3x3"},    {"wasserstein", "two_point_metric"}, {"oracle-check", "minimal_1x1"}};
  for (const auto& [cmd, file] : runs) {
    auto r = run_scenario(load_instance(kInstances / (file + ".json")), {.command = cmd});
    EXPECT_TRUE(r.ok) << cmd << " " << r.document.dump(2);
    EXPECT_EQ(r.document["command"], cmd);
    EXPECT_FALSE(r.document.contains("timing_ms"));
  }
}

TEST(ScenarioTest, ReportsAreDeterministic) {
  auto inst = load_instance(kInstances / "line_absdiff.json");
  for (const auto& cmd : scenario_commands()) {
    if (cmd == "cover" || cmd == "arveson" || cmd == "wasserstein") continue;
    ScenarioOptions opt{.command = cmd};
    if (cmd == "partition") opt.eps = "1/2";
    EXPECT_EQ(run_scenario(inst, opt).document, run_scenario(inst, opt).document) << cmd;
  }
}

TEST(ScenarioTest, ModeOverrideAgreesWithinTolerance) {
  auto exact = run_scenario(load_instance(kInstances / "random_3x3.json"), {.command = "chain"});
  auto approx = run_scenario(load_instance(kInstances / "random_3x3.json", ArithmeticMode::floating), {.command = "chain"});
  EXPECT_EQ(approx.document["arithmetic"], "float");
  for (auto key : {"alpha", "alpha_star", "beta", "beta_star"})
    EXPECT_NEAR(approx.document["values"][key].get<double>(),
                to_double(parse_rational(exact.document["values"][key].get<std::string>())), 1e-9);
}

TEST(ScenarioTest, MissingIngredientsAreInputErrors) {
  auto inst = load_instance(kInstances / "random_3x3.json");
  EXPECT_THROW(run_scenario(inst, {.command = "cover"}), ValidationError);
  EXPECT_THROW(run_scenario(inst, {.command = "approx"}), ValidationError);
  EXPECT_THROW(run_scenario(inst, {.command = "extend"}), ValidationError);
  EXPECT_THROW(run_scenario(inst, {.command = "teleport"}), ValidationError);
}

TEST(ScenarioTest, FailedCheckClearsOk) {
  detail::Checks checks;
  checks.add("first", true);
  EXPECT_TRUE(checks.ok());
  checks.add("second", false, "why");
  EXPECT_FALSE(checks.ok());
  EXPECT_EQ(checks.json()[1]["detail"], "why");
}

}  // namespace
}  // namespace mkdual
