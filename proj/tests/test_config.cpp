#include <string>

#include "doctest.h"
#include "svlift/config.hpp"
#include "svlift/errors.hpp"

using namespace svlift;

namespace {

std::string config_path(const char* name) { return std::string(SVLIFT_CONFIG_DIR) + "/" + name; }

const char* kMinimal = R"([kernel]
alpha = [0.75]
delta = 1.0

[model]
d_tilde = 1
beta = [[1.0]]
sigma = [[[0.3]]]
V0 = [1.0]
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("shipped configs parse and validate") {
  const auto one = parse_config(config_path("rough_heston_1d.toml"));
  CHECK(one.model.d == 1);
  CHECK(one.model.kernel.alpha == std::vector<double>{0.75});
  CHECK(one.sim.n_paths == 10000);
  CHECK(one.seed == 1);
  const auto two = parse_config(config_path("rough_heston_2d.toml"));
  CHECK(two.model.d == 2);
  CHECK(two.model.d_tilde == 1);
  CHECK(two.model.s(1, 1, 0) == -0.7);
  CHECK(two.model.b(1, 0) == 0.5);
  CHECK(two.experiment.mean_times == std::vector<double>{1.0, 5.0});
  CHECK(validate(two.model).empty());
}

TEST_CASE("defaults") {
  const auto c = parse_config_text(kMinimal);
  CHECK(c.sim == SimConfig{});
  CHECK(c.experiment == ExperimentParams{});
  CHECK(c.model.initial.kind == InitialKind::DiracAtZero);
  CHECK(c.model.c.size() == 1);
}

TEST_CASE("toml subset") {
  const auto d = toml::parse("# comment\n[a]\nx = 1.5e-3  # trailing\ns = \"hi\"\nb = true\narr = [\n  1, # one\n  2,\n]\n");
  CHECK(d.at("a.x").number == 1.5e-3);
  CHECK(d.at("a.s").text == "hi");
  CHECK(d.at("a.b").boolean);
  REQUIRE(d.at("a.arr").items.size() == 2);
  CHECK(d.at("a.arr").items[1].number == 2.0);
  CHECK(d.at("a.arr").line == 6);
  CHECK_THROWS_AS(toml::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("[a]\nx = \n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("[a]\nx = [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("[a\nx = 1\n"), ConfigError);
}

TEST_CASE("errors carry line numbers") {
  CHECK(error_of("[kernel]\nalpha = [0.75]\ndelta = 1.0\n\n[model]\nbeta = oops\n").find("line 6") != std::string::npos);
  CHECK(error_of("[a]\nx = 1\nx = 2\n").find("line 3") != std::string::npos);
  const auto wrong_type = error_of(replace(kMinimal, "delta = 1.0", "delta = \"one\""));
  CHECK(wrong_type.find("line 3") != std::string::npos);
  CHECK(wrong_type.find("kernel.delta") != std::string::npos);
}

TEST_CASE("missing and unknown keys") {
  const auto missing = error_of(replace(kMinimal, "sigma = [[[0.3]]]\n", ""));
  CHECK(missing.find("model.sigma") != std::string::npos);
  const auto unknown = error_of(std::string(kMinimal) + "colour = 3\n");
  CHECK(unknown.find("model.colour") != std::string::npos);
  CHECK(error_of(std::string(kMinimal) + "[extra]\nx = 1\n").find("extra.x") != std::string::npos);
  CHECK(error_of(replace(kMinimal, "beta = [[1.0]]", "beta = [[1.0, 2.0]]")).find("model.beta") != std::string::npos);
}

TEST_CASE("model violations name the clause") {
  try {
    parse_config_text(replace(kMinimal, "alpha = [0.75]", "alpha = [0.4]"));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    bool has_b = false;
    for (const auto& v : e.violations()) has_b |= v.clause == "b";
    CHECK(has_b);
  }
  CHECK_THROWS_AS(parse_config_text(replace(kMinimal, "V0 = [1.0]", "V0 = [-1.0]")), ValidationError);
  CHECK_NOTHROW(parse_config_unchecked(replace(kMinimal, "alpha = [0.75]", "alpha = [0.4]")));
}

TEST_CASE("simulation settings are checked") {
  CHECK_THROWS(parse_config_text(std::string(kMinimal) + "[sim]\ndt = -0.1\n"));
  CHECK_THROWS(parse_config_text(std::string(kMinimal) + "[sim]\nn_paths = 0\n"));
  CHECK_THROWS(parse_config_text(std::string(kMinimal) + "[sim]\nn_paths = 2.5\n"));
}

TEST_CASE("serialize round trip") {
  for (const char* name : {"rough_heston_1d.toml", "rough_heston_2d.toml"}) {
    CAPTURE(name);
    const auto c = parse_config(config_path(name));
    const auto text = serialize_config(c);
    const auto back = parse_config_text(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
  }
  auto c = parse_config_text(kMinimal);
  c.model.initial.kind = InitialKind::DiracPlusPower;
  c.model.initial.mu_exponent = {0.1};
  c.seed = 123456789012345ULL;
  c.sim.dt = 1.0 / 3.0;
  c.sim.horizon = 1.0;
  c.sim.record_grid = {1.0 / 3.0, 2.0 / 3.0};
  CHECK(parse_config_text(serialize_config(c)) == c);
}
