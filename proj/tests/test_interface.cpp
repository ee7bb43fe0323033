#include "cqdw/io.hpp"
#include "cqdw/presets.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>

using namespace cqdw;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cqdw_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CQDW_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults validate and round-trip") {
    const RunConfig c;
    CHECK_NOTHROW(c.validate());
    const RunConfig back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
  }

  TEST_CASE("partial documents keep defaults") {
    const RunConfig c = config_from_json(json::parse(R"({"kernels": {"cubic": {"sigma": 0.1}}})"));
    CHECK(c.cubic.sigma == 0.1);
    CHECK(c.quintic.sigma == 1.0);
    CHECK(c.spacing == 0.1);
  }

  TEST_CASE("every violation is reported") {
    const json j = json::parse(R"({
      "grid": {"spacing": -1, "colour": 3},
      "kernels": {"cubic": {"family": "lorentzian"}},
      "signs": {"s": 2},
      "extra": {}
    })");
    try {
      config_from_json(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.violations().size() >= 5);
    }
  }

  TEST_CASE("hash changes with content") {
    RunConfig a, b;
    b.cubic.sigma = 2.0;
    CHECK(config_hash(a) != config_hash(b));
  }
}

TEST_SUITE("presets") {
  TEST_CASE("builtin presets are valid and unique") {
    std::set<std::string> names;
    for (const auto& p : builtin_presets()) {
      CHECK_NOTHROW(p.config.validate());
      CHECK(names.insert(p.name).second);
      for (const auto& e : p.expected) {
        CHECK(e.tolerance > 0.0);
        CHECK_FALSE(e.provenance.empty());
      }
    }
    CHECK_THROWS(find_preset("no-such-preset"));
  }

  TEST_CASE("empty preset passes vacuously with a warning") {
    const ScenarioPreset p{"empty", "", "spectrum", RunConfig{}, {}};
    const RegressionReport r = regress(p);
    CHECK(r.overall == CheckStatus::pass);
    CHECK_FALSE(r.warnings.empty());
  }

  TEST_CASE("unknown quantity is an error, a miss is a failure") {
    ScenarioPreset p{"mixed", "", "spectrum", RunConfig{}, {}};
    p.expected.push_back({"omega0", 0.13282, 5e-4, "reported"});
    REQUIRE(regress(p).overall == CheckStatus::pass);
    p.expected.push_back({"omega1", 1.0, 1e-3, "wrong on purpose"});
    CHECK(regress(p).overall == CheckStatus::fail);
    p.expected.push_back({"no.such.quantity", 0.0, 1.0, "none"});
    CHECK(regress(p).overall == CheckStatus::error);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("runs are deterministic") {
    const fs::path d = scratch("det");
    REQUIRE(run_cli("spectrum --out " + (d / "a").string()) == 0);
    REQUIRE(run_cli("spectrum --out " + (d / "b").string()) == 0);
    for (const char* f : {"basis.csv", "spectrum.json", "manifest.json"}) {
      CHECK(io::read_text(d / "a" / f) == io::read_text(d / "b" / f));
    }
    const json m = json::parse(io::read_text(d / "a" / "manifest.json"));
    CHECK(m["command"] == "spectrum");
    CHECK(m["config_hash"] == config_hash(RunConfig{}));
  }

  TEST_CASE("missing config file") {
    const fs::path d = scratch("missing");
    CHECK(run_cli("spectrum --config " + (d / "nope.json").string() + " --out " + d.string()) == 3);
    const json e = json::parse(io::read_text(d / "error.json"));
    CHECK(e["status"] == "error");
    CHECK(e["error"] == "io");
  }

  TEST_CASE("invalid config lists violations") {
    const fs::path d = scratch("bad");
    io::write_text(d / "c.json", R"({"grid": {"spacing": 0}, "signs": {"delta": 5}})");
    CHECK(run_cli("spectrum --config " + (d / "c.json").string() + " --out " + d.string()) == 2);
    const json e = json::parse(io::read_text(d / "error.json"));
    CHECK(e["error"] == "config");
    CHECK(e["violations"].size() == 2);
  }

  TEST_CASE("unknown preset") {
    const fs::path d = scratch("preset");
    CHECK(run_cli("regress --preset nothing --out " + d.string()) != 0);
  }
}
