#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "klmap/cli.hpp"
#include "klmap/config.hpp"
#include "klmap/errors.hpp"
#include "klmap/experiment.hpp"
#include "klmap/io.hpp"
#include "klmap/objective.hpp"

using namespace klmap;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig = R"(# small linear benchmark
[grid]
a = 0
b = 1
m = 65

[prior]
family = brownian
drop_tol = 1e-12

[forward]
kind = point_observation
obs_count = 8

[noise]
variance = 0.05

[data]
mode = synthesize
truth = prior_sample
truth_seed = 7
seed = 11

[solver]
grad_tol = 1e-8
max_iters = 20000

[sweep]
ns = 1, 2, 4, 8
lipschitz_samples = 100
seed = 3

[output]
directory = out
emit_svg = true
)";

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("klmap_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path write_config(const TempDir& dir, const std::string& text,
                      const std::string& name = "config.ini") {
  const fs::path p = dir.path / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  SUBCASE("valid text with defaults applied") {
    const ExperimentConfig cfg = parse_config_text(kSmallConfig, "test");
    CHECK(cfg.grid.m == 65);
    CHECK(cfg.prior.family == KernelFamily::brownian);
    CHECK(cfg.prior.variance == 1.0);            // default
    CHECK(cfg.solver.backtrack_factor == 0.5);   // default
    CHECK(cfg.forward.obs_count == 8);
    CHECK(cfg.noise.variance == 0.05);
    CHECK(cfg.sweep.present);
    CHECK(cfg.sweep.ns == std::vector<int>{1, 2, 4, 8});
    CHECK(cfg.output.emit_svg);
  }

  SUBCASE("unknown key is named with its line") {
    std::string text = kSmallConfig;
    text += "\n[solver]\n";  // duplicate section is fine, duplicate keys are not
    text = std::string(kSmallConfig) + "bogus_key = 1\n";
    try {
      parse_config_text(text, "test");
      FAIL("expected ConfigError");
    } catch (const ConfigError& ex) {
      const std::string what = ex.what();
      CHECK(what.find("bogus_key") != std::string::npos);
      CHECK(what.find("test:") != std::string::npos);
    }
  }

  SUBCASE("unknown section is rejected") {
    CHECK_THROWS_AS(parse_config_text(std::string(kSmallConfig) + "[magic]\nx = 1\n", "t"),
                    ConfigError);
  }

  SUBCASE("missing required key is rejected") {
    CHECK_THROWS_AS(parse_config_text("[grid]\na = 0\nb = 1\n", "t"), ConfigError);
  }

  SUBCASE("malformed values carry line info") {
    std::string text(kSmallConfig);
    const auto pos = text.find("m = 65");
    text.replace(pos, 6, "m = pony");
    try {
      parse_config_text(text, "test");
      FAIL("expected ConfigError");
    } catch (const ConfigError& ex) {
      CHECK(std::string(ex.what()).find("grid.m") != std::string::npos);
    }
  }

  SUBCASE("conflicting noise specifications are rejected") {
    std::string text(kSmallConfig);
    const auto pos = text.find("variance = 0.05");
    text.insert(pos, "variances = 0.05, 0.05\n");
    CHECK_THROWS_AS(parse_config_text(text, "t"), ConfigError);
  }

  SUBCASE("duplicate keys are rejected") {
    CHECK_THROWS_AS(
        parse_config_text("[grid]\na = 0\na = 1\nb = 2\nm = 5\n", "t"), ConfigError);
  }

  SUBCASE("serialization round-trips") {
    const ExperimentConfig cfg = parse_config_text(kSmallConfig, "test");
    const std::string echoed = serialize_config(cfg);
    const ExperimentConfig again = parse_config_text(echoed, "echo");
    CHECK(serialize_config(again) == echoed);
  }
}

TEST_CASE("obs_count resolves to equally spaced interior locations") {
  ExperimentConfig cfg = parse_config_text(kSmallConfig, "test");
  cfg.forward.obs_count = 3;
  cfg.forward.obs_locations.reset();
  const auto locs = resolve_obs_locations(cfg);
  REQUIRE(locs.size() == 3);
  CHECK(locs[0] == doctest::Approx(0.25));
  CHECK(locs[1] == doctest::Approx(0.5));
  CHECK(locs[2] == doctest::Approx(0.75));
}

TEST_CASE("kl-eigs command") {
  TempDir dir;
  const fs::path config = write_config(dir, kSmallConfig);
  cli::CommandOptions opts;
  opts.config_path = config.string();
  opts.out_override = (dir.path / "out").string();

  CHECK(cli::cmd_kl_eigs(opts) == cli::kOk);
  const std::string eigs = slurp(dir.path / "out" / "eigenvalues.csv");
  CHECK(eigs.rfind("k,lambda_k\n", 0) == 0);
  CHECK(count_lines(eigs) == 66);  // header + one row per mode
  CHECK(fs::exists(dir.path / "out" / "eigenfunctions.csv"));
  CHECK(fs::exists(dir.path / "out" / "effective_config.ini"));
  CHECK_FALSE(fs::exists(dir.path / "out" / "eigenvalues.csv.tmp"));

  SUBCASE("rerun is bitwise identical") {
    const std::string first = slurp(dir.path / "out" / "eigenvalues.csv");
    CHECK(cli::cmd_kl_eigs(opts) == cli::kOk);
    CHECK(slurp(dir.path / "out" / "eigenvalues.csv") == first);
  }

  SUBCASE("config errors exit with code 2") {
    const fs::path bad = write_config(dir, std::string(kSmallConfig) + "oops = 1\n",
                                      "bad.ini");
    cli::CommandOptions bad_opts;
    bad_opts.config_path = bad.string();
    CHECK(cli::cmd_kl_eigs(bad_opts) == cli::kConfigError);
    cli::CommandOptions missing;
    missing.config_path = (dir.path / "nope.ini").string();
    CHECK(cli::cmd_kl_eigs(missing) == cli::kConfigError);
  }

  SUBCASE("Brownian spectrum lands in the CSV") {
    std::string big(kSmallConfig);
    const auto pos = big.find("m = 65");
    big.replace(pos, 6, "m = 513");
    const fs::path config2 = write_config(dir, big, "big.ini");
    cli::CommandOptions opts2;
    opts2.config_path = config2.string();
    opts2.out_override = (dir.path / "out513").string();
    CHECK(cli::cmd_kl_eigs(opts2) == cli::kOk);
    std::ifstream in(dir.path / "out513" / "eigenvalues.csv");
    std::string line;
    std::getline(in, line);  // header
    std::getline(in, line);
    const double lambda_1 = std::stod(line.substr(line.find(',') + 1));
    CHECK(lambda_1 == doctest::Approx(0.405285).epsilon(1e-3));
  }
}

TEST_CASE("solve command") {
  TempDir dir;
  const fs::path config = write_config(dir, kSmallConfig);
  cli::CommandOptions opts;
  opts.config_path = config.string();
  opts.out_override = (dir.path / "out").string();

  SUBCASE("full solve converges and writes artifacts") {
    CHECK(cli::cmd_solve(opts) == cli::kOk);
    for (const char* name :
         {"solution.csv", "solution_nodal.csv", "trace.csv", "dataset.csv", "truth.csv",
          "effective_config.ini"}) {
      CHECK(fs::exists(dir.path / "out" / name));
    }
  }

  SUBCASE("--n 1 writes a single-coefficient solution") {
    opts.truncation_n = 1;
    CHECK(cli::cmd_solve(opts) == cli::kOk);
    const std::string sol = slurp(dir.path / "out" / "solution.csv");
    CHECK(count_lines(sol) == 2);  // header + one coefficient
    CHECK(sol.rfind("k,xi_k\n", 0) == 0);
  }

  SUBCASE("--n beyond the rank exits 2") {
    opts.truncation_n = 1000;
    CHECK(cli::cmd_solve(opts) == cli::kConfigError);
  }

  SUBCASE("non-convergence exits 4 but still writes the files") {
    std::string starved(kSmallConfig);
    const auto pos = starved.find("max_iters = 20000");
    starved.replace(pos, std::string("max_iters = 20000").size(), "max_iters = 3");
    const fs::path config2 = write_config(dir, starved, "starved.ini");
    cli::CommandOptions opts2;
    opts2.config_path = config2.string();
    opts2.out_override = (dir.path / "out_starved").string();
    CHECK(cli::cmd_solve(opts2) == cli::kNotConverged);
    CHECK(fs::exists(dir.path / "out_starved" / "solution.csv"));
    CHECK(fs::exists(dir.path / "out_starved" / "trace.csv"));
  }

  SUBCASE("effective config reproduces the run bitwise") {
    CHECK(cli::cmd_solve(opts) == cli::kOk);
    const std::string solution = slurp(dir.path / "out" / "solution.csv");

    cli::CommandOptions echo_opts;
    echo_opts.config_path = (dir.path / "out" / "effective_config.ini").string();
    echo_opts.out_override = (dir.path / "out2").string();
    CHECK(cli::cmd_solve(echo_opts) == cli::kOk);
    CHECK(slurp(dir.path / "out2" / "solution.csv") == solution);
  }
}

TEST_CASE("verify command") {
  TempDir dir;
  const fs::path config = write_config(dir, kSmallConfig);
  cli::CommandOptions opts;
  opts.config_path = config.string();
  opts.out_override = (dir.path / "out").string();

  CHECK(cli::cmd_verify(opts) == cli::kOk);
  const std::string bounds = slurp(dir.path / "out" / "bounds.csv");
  CHECK(bounds.rfind("n,lambda_star_n,err_x,bound_x,thm1_ok,err_u,bound_u,cor1_ok,"
                     "J_star,J_truncated,bound_gap,cor2_ok\n", 0) == 0);
  CHECK(count_lines(bounds) == 5);  // header + 4 sweep rows
  CHECK(fs::exists(dir.path / "out" / "bounds.svg"));

  SUBCASE("rerun is bitwise identical") {
    CHECK(cli::cmd_verify(opts) == cli::kOk);
    const std::string again = slurp(dir.path / "out" / "bounds.csv");
    CHECK(again == bounds);
  }

  SUBCASE("svg is well-formed enough to contain both series") {
    const std::string svg = slurp(dir.path / "out" / "bounds.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("err_x") != std::string::npos);
    CHECK(svg.find("bound_x") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
  }

  SUBCASE("a config without a sweep section exits 2") {
    std::string no_sweep(kSmallConfig);
    const auto pos = no_sweep.find("[sweep]");
    no_sweep.erase(pos, no_sweep.find("[output]") - pos);
    const fs::path config2 = write_config(dir, no_sweep, "nosweep.ini");
    cli::CommandOptions opts2;
    opts2.config_path = config2.string();
    opts2.out_override = (dir.path / "out3").string();
    CHECK(cli::cmd_verify(opts2) == cli::kConfigError);
  }
}

TEST_CASE("gradcheck command") {
  TempDir dir;
  const fs::path config = write_config(dir, kSmallConfig);
  cli::CommandOptions opts;
  opts.config_path = config.string();
  opts.out_override = (dir.path / "out").string();

  CHECK(cli::cmd_gradcheck(opts) == cli::kOk);

  SUBCASE("nonlinear forward model also passes") {
    std::string nonlinear(kSmallConfig);
    const auto pos = nonlinear.find("kind = point_observation");
    nonlinear.replace(pos, std::string("kind = point_observation").size(),
                      "kind = nonlinear_pointwise\nnonlinearity_eps = 0.1");
    const fs::path config2 = write_config(dir, nonlinear, "nonlinear.ini");
    cli::CommandOptions opts2;
    opts2.config_path = config2.string();
    opts2.out_override = (dir.path / "out2").string();
    CHECK(cli::cmd_gradcheck(opts2) == cli::kOk);
  }

  SUBCASE("corrupted gradients are caught") {
    opts.corrupt_gradient = true;
    testhook::corrupt_gradients = true;  // release builds have no CLI hook
    const int code = cli::cmd_gradcheck(opts);
    testhook::corrupt_gradients = false;
    CHECK(code != cli::kOk);
  }
}

TEST_CASE("output directory resolution order") {
  cli::CommandOptions opts;
  CHECK(cli::resolve_output_dir(opts, "cfg_dir") == fs::path("cfg_dir"));

  ::setenv("KLMAP_OUTPUT_DIR", "env_dir", 1);
  CHECK(cli::resolve_output_dir(opts, "cfg_dir") == fs::path("env_dir"));

  opts.out_override = "flag_dir";
  CHECK(cli::resolve_output_dir(opts, "cfg_dir") == fs::path("flag_dir"));
  ::unsetenv("KLMAP_OUTPUT_DIR");
}

TEST_CASE("dataset files round-trip through load mode") {
  TempDir dir;
  const fs::path config = write_config(dir, kSmallConfig);
  cli::CommandOptions opts;
  opts.config_path = config.string();
  opts.out_override = (dir.path / "out").string();
  REQUIRE(cli::cmd_solve(opts) == cli::kOk);
  const std::string solution = slurp(dir.path / "out" / "solution.csv");

  // same problem, but the data now comes from the emitted CSV
  std::string load_config(kSmallConfig);
  const auto data_pos = load_config.find("[data]");
  const auto solver_pos = load_config.find("[solver]");
  load_config.replace(data_pos, solver_pos - data_pos,
                      "[data]\nmode = load\npath = out/dataset.csv\n\n");
  const fs::path config2 = write_config(dir, load_config, "load.ini");
  cli::CommandOptions opts2;
  opts2.config_path = config2.string();
  opts2.out_override = (dir.path / "out_loaded").string();
  CHECK(cli::cmd_solve(opts2) == cli::kOk);
  CHECK(slurp(dir.path / "out_loaded" / "solution.csv") == solution);

  // the echoed config carries absolute paths, so it replays from the out dir
  cli::CommandOptions opts3;
  opts3.config_path = (dir.path / "out_loaded" / "effective_config.ini").string();
  opts3.out_override = (dir.path / "out_replayed").string();
  CHECK(cli::cmd_solve(opts3) == cli::kOk);
  CHECK(slurp(dir.path / "out_replayed" / "solution.csv") == solution);
}

}  // TEST_SUITE
