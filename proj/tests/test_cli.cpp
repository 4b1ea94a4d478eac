#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdelab/cli.hpp"
#include "sdelab/config.hpp"

using namespace sdelab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sde_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sdelab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Restores SDE_LAB_SEED on scope exit.
struct SeedEnv {
  std::string saved;
  bool had = false;
  explicit SeedEnv(const char* value) {
    if (const char* v = std::getenv("SDE_LAB_SEED")) {
      had = true;
      saved = v;
    }
    if (value) ::setenv("SDE_LAB_SEED", value, 1);
    else ::unsetenv("SDE_LAB_SEED");
  }
  ~SeedEnv() {
    if (had) ::setenv("SDE_LAB_SEED", saved.c_str(), 1);
    else ::unsetenv("SDE_LAB_SEED");
  }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("parsing errors map to exit code 2") {
    CHECK(invoke({}).code == cli::kExitParseError);
    CHECK(invoke({"no-such-command"}).code == cli::kExitParseError);
    CHECK(invoke({"lemma21", "--bogus"}).code == cli::kExitParseError);
    CHECK(invoke({"--seed", "-3", "lemma21"}).code == cli::kExitParseError);
    CHECK(invoke({"--dt", "0.3", "sweep"}).code == cli::kExitParseError);
    CHECK(invoke({"--taming", "maybe", "sweep"}).code == cli::kExitParseError);
    CHECK(invoke({"--config", "/nonexistent/config.json", "lemma21"}).code == cli::kExitParseError);
    const auto help = invoke({"--help"});
    CHECK(help.code == cli::kExitOk);
    CHECK(help.out.find("sweep") != std::string::npos);
  }

  TEST_CASE("lemma21 passes and reports JSON") {
    const auto r = invoke({"lemma21"});
    CHECK(r.code == cli::kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["passed"].get<bool>());
    CHECK(j["grid_size"].get<int>() == 72);
  }

  TEST_CASE("verify-bounds on a small budget") {
    const auto r = invoke({"verify-bounds", "--trials", "2000"});
    CHECK(r.code == cli::kExitOk);
    CHECK(nlohmann::json::parse(r.out)["passed"].get<bool>());
  }

  TEST_CASE("stdnorm-check") {
    const auto r = invoke({"--paths", "2000", "stdnorm-check"});
    CHECK(r.code == cli::kExitOk);
  }

  TEST_CASE("simulate writes both files") {
    const auto dir = scratch("simulate");
    const auto r = invoke({"--output", dir.string(), "--dt", "1/256", "simulate", "--x0", "0,0,0,0.1,0"});
    CHECK(r.code == cli::kExitOk);
    const std::string path = slurp(dir / "path.csv");
    CHECK(path.rfind("t,x1,x2,x3,x4,x5\n", 0) == 0);
    CHECK(slurp(dir / "brownian.csv").rfind("t,w1\n", 0) == 0);
    CHECK(std::count(path.begin(), path.end(), '\n') == 258);
  }

  TEST_CASE("sweeps are reproducible byte for byte") {
    const auto a = scratch("sweep_a"), b = scratch("sweep_b");
    const std::vector<std::string> common{"--paths", "200", "--eps", "e^-1,e^-2,e^-3", "--seed", "9"};
    auto args_a = common;
    args_a.insert(args_a.end(), {"--output", a.string(), "sweep"});
    auto args_b = common;
    args_b.insert(args_b.end(), {"--output", b.string(), "--threads", "3", "sweep"});
    CHECK(invoke(args_a).code == cli::kExitOk);
    CHECK(invoke(args_b).code == cli::kExitOk);
    CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
    CHECK(!slurp(a / "sweep.csv").empty());
    const auto summary = nlohmann::json::parse(slurp(a / "sweep_summary.json"));
    CHECK(summary.contains("constants"));
  }

  TEST_CASE("seed precedence") {
    const auto flag = scratch("seed_flag"), env = scratch("seed_env"), file = scratch("seed_file");
    {
      SeedEnv guard("7");
      CHECK(invoke({"--output", env.string(), "--dt", "1/64", "simulate"}).code == cli::kExitOk);
      std::ofstream(file / "c.json") << R"({"seed": 8, "dt": 0.015625})";
      CHECK(invoke({"--config", (file / "c.json").string(), "--output", file.string(), "simulate"}).code ==
            cli::kExitOk);
    }
    {
      SeedEnv guard(nullptr);
      CHECK(invoke({"--seed", "7", "--output", flag.string(), "--dt", "1/64", "simulate"}).code == cli::kExitOk);
      const auto eight = scratch("seed_eight");
      CHECK(invoke({"--seed", "8", "--output", eight.string(), "--dt", "1/64", "simulate"}).code == cli::kExitOk);
      CHECK(slurp(file / "brownian.csv") == slurp(eight / "brownian.csv"));
    }
    CHECK(slurp(flag / "brownian.csv") == slurp(env / "brownian.csv"));
    CHECK(slurp(flag / "brownian.csv") != slurp(file / "brownian.csv"));
    SeedEnv bad("abc");
    CHECK(invoke({"lemma21"}).code == cli::kExitParseError);
  }

  TEST_CASE("check commands on small budgets") {
    CHECK(invoke({"--paths", "2", "transform-check", "--steps", "4096"}).code == cli::kExitOk);
    CHECK(invoke({"--paths", "2", "variation-check", "--steps", "1024"}).code == cli::kExitOk);
  }
}

TEST_SUITE("config") {
  TEST_CASE("real expressions") {
    CHECK(parse_real("0.25") == 0.25);
    CHECK(parse_real("e") == doctest::Approx(std::numbers::e).epsilon(1e-15));
    CHECK(parse_real("1/e") == doctest::Approx(1.0 / std::numbers::e).epsilon(1e-15));
    CHECK(parse_real(" e^-3 ") == doctest::Approx(std::exp(-3.0)).epsilon(1e-15));
    CHECK(parse_real("exp(-2)") == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(parse_real("pi/4") == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
    CHECK(parse_real("1/2048") == 1.0 / 2048);
    CHECK_THROWS_AS(parse_real("abc"), ConfigError);
    CHECK_THROWS_AS(parse_real(""), ConfigError);
    CHECK(parse_real_list("1, 2,e^-1") == std::vector<double>{1.0, 2.0, std::exp(-1.0)});
  }

  TEST_CASE("json keys") {
    ExperimentConfig cfg;
    apply_json(cfg, nlohmann::json::parse(R"({"n": 2, "q": 4, "d": 6, "dt": "1/1024", "scheme": "em",
                                              "eps_grid": {"start_exponent": 1, "stop_exponent": 3, "per_decade": 2},
                                              "taming": false, "q_upper": 0.5})"));
    CHECK(cfg.model.n == 2);
    CHECK(cfg.model.d == 6);
    CHECK(cfg.dt == 1.0 / 1024);
    CHECK(cfg.steps() == 1024);
    CHECK(cfg.scheme == Scheme::EulerMaruyama);
    CHECK_FALSE(cfg.taming);
    CHECK(cfg.q_upper == 0.5);
    REQUIRE(cfg.eps_grid.size() == 5);
    CHECK(cfg.eps_grid[4] == doctest::Approx(std::exp(-3.0)).epsilon(1e-15));
    CHECK_NOTHROW(cfg.validate());
    CHECK_THROWS_AS(apply_json(cfg, nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
    ExperimentConfig bad;
    bad.dt = 0.3;
    CHECK_THROWS_AS(bad.steps(), ConfigError);
    CHECK(parse_scheme("cascade") == Scheme::Cascade);
    CHECK(scheme_name(Scheme::EulerMaruyama) == "em");
    CHECK_THROWS_AS(parse_scheme("rk4"), ConfigError);
  }

  TEST_CASE("exponent grids") {
    const auto g = eps_grid_from_exponents(1, 6, 1);
    REQUIRE(g.size() == 6);
    CHECK(g.front() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(g.back() == doctest::Approx(std::exp(-6.0)).epsilon(1e-15));
    CHECK_THROWS_AS(eps_grid_from_exponents(3, 1, 1), ConfigError);
    CHECK(ExperimentConfig{}.mc_options().dt == 1.0 / 2048);
  }
}
