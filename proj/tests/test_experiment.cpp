#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qbsim/experiment.hpp"

using namespace qbsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qbsim_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("parsing") {
  const auto c = parse_config("kind = spectrum\n# comment\nkappa = 4.8  # trailing\n N=12\nkernel=continuum\n");
  CHECK(c.kind == ExperimentKind::spectrum);
  CHECK(c.kappa == 4.8);
  CHECK(c.N == 12);
  CHECK(c.kernel == KernelVariant::continuum);
}

TEST_CASE("errors name the key") {
  try {
    parse_config("bogus = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "bogus");
    CHECK(std::string(e.what()) == "bogus: unknown key");
  }
  ExperimentConfig c;
  CHECK_THROWS_AS(apply_setting(c, "kappa", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "N", "-3"), ConfigError);
  CHECK_THROWS_AS(parse_config("kappa 3\n"), ConfigError);
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("kappa grid") {
  ExperimentConfig c;
  c.kappa = 3.3;
  CHECK(kappa_grid(c) == std::vector<Real>{3.3});
  c.kappa_min = 3.0;
  c.kappa_max = 3.2;
  c.kappa_step = 0.1;
  const auto g = kappa_grid(c);
  REQUIRE(g.size() == 3);
  CHECK(g.back() == doctest::Approx(3.2));
  c.kappa_min = 4.0;
  try {
    kappa_grid(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("empty sweep") != std::string::npos);
  }
}

TEST_CASE("text round trip is exact") {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    CHECK_NOTHROW(validate(c));
    const auto back = parse_config(to_text(c));
    CHECK(config_entries(back) == config_entries(c));
  }
  ExperimentConfig c;
  c.kappa = 0.1 + 0.2;
  CHECK(parse_config(to_text(c)).kappa == c.kappa);
}

TEST_CASE("schedule rules") {
  ExperimentConfig c;
  CHECK(schedule_for(c, 4.0) == ProtocolSchedule::equal_segments(4.0));
  c.schedule = ScheduleKind::explicit_durations;
  c.tau_c = 0.1;
  c.tau_s = 0.2;
  c.tau_d = 0.3;
  CHECK(schedule_for(c, 4.0) == ProtocolSchedule(0.1, 0.2, 0.3));
  c.tau_c = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("runs are deterministic and write sidecars") {
  auto c = preset("fig2b");
  c.N = 6;
  c.kappa_min = 4.0;
  c.kappa_max = 5.0;
  c.kappa_step = 0.25;
  const fs::path a = scratch("a"), b = scratch("b");
  const auto ra = run_experiment(c, a, 1);
  run_experiment(c, b, 3);
  REQUIRE(!ra.files.empty());
  for (const auto& f : ra.files) {
    CHECK(slurp(f) == slurp(b / f.filename()));
  }
  CHECK(fs::exists(a / "resolved.cfg"));
  CHECK(fs::exists(a / "fbs_summary.meta.json"));
  CHECK(slurp(a / "fbs_summary.meta.json").find("\"config.kappa_step\"") != std::string::npos);
  CHECK(config_entries(load_config(a / "resolved.cfg")) == config_entries(c));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("memory cap is checked before compute") {
  auto c = preset("fig3a");
  c.max_memory_mb = 1;
  CHECK_THROWS_AS(run_experiment(c, scratch("mem"), 1), ResourceError);
}

TEST_CASE("parallel_for visits every index and propagates errors") {
  std::atomic<int> sum{0};
  parallel_for(100, 4, [&](std::size_t i) { sum += int(i); });
  CHECK(sum == 4950);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw DomainError("x");
                  }),
                  DomainError);
}
