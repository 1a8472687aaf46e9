#include <sstream>

#include <doctest.h>

#include "fracfield/config.hpp"

using namespace fracfield;

namespace {

const std::set<std::string> kKeys{"d", "betas", "meshes", "kappa", "functionals", "mode", "plot"};

ConfigMap parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, kKeys, "test.cfg");
}

}  // namespace

TEST_CASE("comments, blank lines, whitespace and quotes") {
  const ConfigMap c = parse("# study\n\n  d = 2  \nkappa=0.5\r\n   # indented comment\nmode = \"dense\"\n");
  CHECK(c.size() == 3);
  CHECK(c.at("d") == "2");
  CHECK(c.at("kappa") == "0.5");
  CHECK(c.at("mode") == "dense");
  CHECK(parse("").empty());
}

TEST_CASE("values may contain '='") {
  CHECK(parse("mode = a=b\n").at("mode") == "a=b");
}

TEST_CASE("structural errors name the source and line") {
  CHECK_THROWS_WITH_AS(parse("d = 1\nbogus = 3\n"), "test.cfg:2: unknown key 'bogus'", ConfigError);
  CHECK_THROWS_WITH_AS(parse("d = 1\nd = 2\n"), "test.cfg:2: duplicate key 'd'", ConfigError);
  CHECK_THROWS_WITH_AS(parse("\nkappa 0.5\n"), "test.cfg:2: expected key = value", ConfigError);
  CHECK_THROWS_WITH_AS(parse(" = 3\n"), "test.cfg:1: empty key", ConfigError);
}

TEST_CASE("missing file") {
  CHECK_THROWS_WITH_AS(load_config_file("/nonexistent/dir/x.cfg", kKeys),
                       "cannot open config file '/nonexistent/dir/x.cfg'", ConfigError);
}

TEST_CASE("scalar accessors") {
  const ConfigMap c = parse("d = 2\nkappa = 1e-1\nmode = yes\nplot = maybe\nbetas = 0.5x\n");
  CHECK(config_int(c, "d", 1) == 2);
  CHECK(config_int(c, "meshes", 7) == 7);
  CHECK(config_double(c, "kappa", 0.0) == 0.1);
  CHECK(config_bool(c, "mode", false));
  CHECK(config_string(c, "mode", "") == "yes");
  CHECK(config_string(c, "functionals", "none") == "none");
  CHECK_THROWS_WITH_AS(config_bool(c, "plot", false), doctest::Contains("'plot'"), ConfigError);
  CHECK_THROWS_WITH_AS(config_double(c, "betas", 0.0), "invalid value for 'betas': '0.5x'", ConfigError);
  CHECK_THROWS_AS(config_int(c, "kappa", 0), ConfigError);
  CHECK_THROWS_AS(config_int(parse("d =\n"), "d", 0), ConfigError);
}

TEST_CASE("list accessors") {
  const ConfigMap c = parse("betas = 0.6, 0.7,0.8 0.9\nmeshes = 15 31,63\nfunctionals = abs2; probit(0.5,20) abs4\n");
  CHECK(config_doubles(c, "betas", {}) == std::vector<double>{0.6, 0.7, 0.8, 0.9});
  CHECK(config_ints(c, "meshes", {}) == std::vector<Eigen::Index>{15, 31, 63});
  CHECK(config_names(c, "functionals", {}) == std::vector<std::string>{"abs2", "probit(0.5,20)", "abs4"});
  CHECK(config_doubles(c, "kappa", {1.0}) == std::vector<double>{1.0});
  CHECK(config_doubles(parse("betas =\n"), "betas", {1.0}).empty());
  CHECK_THROWS_AS(config_ints(parse("meshes = 15, 3.5\n"), "meshes", {}), ConfigError);
}
