#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <fstream>
#include <filesystem>
#include <string>
#include <vector>

#include "augmc/errors.hpp"
#include "augmc/experiment/config.hpp"

TEST_CASE("flat key-value parsing with comments and whitespace") {
  augmc::config_map cfg = augmc::config_map::parse_string(
      "# experiment setup\n"
      "experiment = morris   # trailing comment\n"
      "\n"
      "  run.n_keep =  500\n"
      "lattice.coupling = 0.4407\n"
      "seeds = 1, 2,3\n");
  REQUIRE(cfg.get_string("experiment") == "morris");
  REQUIRE(cfg.get_count("run.n_keep") == 500);
  REQUIRE(cfg.get_real("lattice.coupling") == Catch::Approx(0.4407));
  REQUIRE(cfg.get_count_list("seeds") ==
          std::vector<std::uint64_t>{1, 2, 3});
  REQUIRE_NOTHROW(cfg.finish());
}

TEST_CASE("defaults only fill in for absent keys") {
  augmc::config_map cfg =
      augmc::config_map::parse_string("alpha = 2.5\nname = run-a\n");
  REQUIRE(cfg.get_real_or("alpha", 9.0) == Catch::Approx(2.5));
  REQUIRE(cfg.get_real_or("beta", 9.0) == Catch::Approx(9.0));
  REQUIRE(cfg.get_string_or("name", "x") == "run-a");
  REQUIRE(cfg.get_string_or("missing", "x") == "x");
  REQUIRE(cfg.get_count_or("n", 7) == 7);
  REQUIRE(cfg.has("alpha"));
  REQUIRE_FALSE(cfg.has("beta"));
}

TEST_CASE("parse failures carry the offending line number") {
  REQUIRE_THROWS_WITH(augmc::config_map::parse_string("a = 1\nb 2\n"),
                      Catch::Matchers::ContainsSubstring(":2") &&
                          Catch::Matchers::ContainsSubstring("key = value"));
  REQUIRE_THROWS_WITH(augmc::config_map::parse_string("= 3\n"),
                      Catch::Matchers::ContainsSubstring("empty key"));
  REQUIRE_THROWS_WITH(augmc::config_map::parse_string("bad key = 3\n"),
                      Catch::Matchers::ContainsSubstring("malformed key"));
  REQUIRE_THROWS_WITH(augmc::config_map::parse_string("a = 1\na = 2\n"),
                      Catch::Matchers::ContainsSubstring(":2") &&
                          Catch::Matchers::ContainsSubstring("duplicate"));
}

TEST_CASE("typed getters reject unconvertible values with their line") {
  augmc::config_map cfg = augmc::config_map::parse_string(
      "x = fast\n"
      "n = -3\n"
      "m = 2.5\n"
      "list = 1, oops\n",
      "test.cfg");
  REQUIRE_THROWS_WITH(cfg.get_real("x"),
                      Catch::Matchers::ContainsSubstring("test.cfg:1") &&
                          Catch::Matchers::ContainsSubstring("real"));
  REQUIRE_THROWS_WITH(cfg.get_count("n"),
                      Catch::Matchers::ContainsSubstring(":2") &&
                          Catch::Matchers::ContainsSubstring("positive"));
  REQUIRE_THROWS_AS(cfg.get_count("m"), augmc::config_error);
  REQUIRE_THROWS_WITH(cfg.get_count_list("list"),
                      Catch::Matchers::ContainsSubstring("oops"));
}

TEST_CASE("unconsumed keys are flagged by line") {
  augmc::config_map cfg = augmc::config_map::parse_string(
      "known = 1\nmystery.knob = 2\n", "test.cfg");
  REQUIRE(cfg.get_count("known") == 1);
  REQUIRE_THROWS_WITH(cfg.finish(),
                      Catch::Matchers::ContainsSubstring("test.cfg:2") &&
                          Catch::Matchers::ContainsSubstring("mystery.knob"));
}

TEST_CASE("string lists split on commas and trim items") {
  augmc::config_map cfg = augmc::config_map::parse_string(
      "kernels =  metropolis ,gibbs,  swendsen-wang \nempty = ,\n");
  REQUIRE(cfg.get_string_list("kernels") ==
          std::vector<std::string>{"metropolis", "gibbs", "swendsen-wang"});
  REQUIRE_THROWS_WITH(cfg.get_string_list("empty"),
                      Catch::Matchers::ContainsSubstring("empty list"));
}

TEST_CASE("echo preserves the original line order") {
  augmc::config_map cfg = augmc::config_map::parse_string(
      "zeta = 1\nalpha = 2\nmiddle = 3\n");
  const auto echoed = cfg.echo();
  REQUIRE(echoed.size() == 3);
  REQUIRE(echoed[0].first == "zeta");
  REQUIRE(echoed[1].first == "alpha");
  REQUIRE(echoed[2].first == "middle");
}

TEST_CASE("overrides replace values in place") {
  augmc::config_map cfg = augmc::config_map::parse_string("seeds = 1, 2\n");
  cfg.override_value("seeds", "7");
  REQUIRE(cfg.get_count_list("seeds") == std::vector<std::uint64_t>{7});
}

TEST_CASE("file loading") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "augmc_config_test.cfg";
  {
    std::ofstream out(path);
    out << "experiment = ising\nlattice.side = 8\n";
  }
  augmc::config_map cfg = augmc::config_map::parse_file(path.string());
  REQUIRE(cfg.name() == path.string());
  REQUIRE(cfg.get_string("experiment") == "ising");
  REQUIRE(cfg.get_count("lattice.side") == 8);
  fs::remove(path);

  REQUIRE_THROWS_AS(augmc::config_map::parse_file("/nonexistent/nope.cfg"),
                    augmc::config_error);
}
