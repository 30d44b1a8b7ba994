#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "bec/config.hpp"
#include "bec/errors.hpp"

using namespace bec;

namespace {

std::filesystem::path write_config(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const auto c = make_run_config(ConfigMap{});
  CHECK(c.n_points == 1024);
  CHECK(c.half_width == 20.0);
  CHECK(c.protocol.tau == 70.0);
  CHECK(c.protocol.hold_time == 30.0);
  CHECK(c.stepper.dt == 1e-3);
  CHECK(c.coupling() == 0.0);
  CHECK(c.noise.corr_length == 0.5);
}

TEST_CASE("file, environment and --set layering") {
  const auto path = write_config("becsim_layering.conf",
                                 "# comment\n g = 3\ntau = 40  # trailing\nhold_time=5\n");
  ConfigMap m;
  m.load_file(path);
  ::setenv("BECSIM_TAU", "50", 1);
  m.load_environment();
  ::unsetenv("BECSIM_TAU");
  m.set_assignment("hold_time=7");
  const auto c = make_run_config(m);
  CHECK(c.coupling() == 3.0);
  CHECK(c.protocol.tau == 50.0);
  CHECK(c.protocol.hold_time == 7.0);
  CHECK(ConfigMap::env_name("hold_time") == "BECSIM_HOLD_TIME");
}

TEST_CASE("errors") {
  ConfigMap m;
  CHECK_THROWS_AS(m.set("no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(m.set_assignment("tau"), ConfigError);
  CHECK_THROWS_AS(m.load_file("/nonexistent/becsim.conf"), IoError);
  CHECK_THROWS_AS(m.load_file(write_config("becsim_bad.conf", "tau 70\n")), ConfigError);

  auto fails = [](std::initializer_list<std::pair<const char*, const char*>> kv) {
    ConfigMap c;
    for (const auto& [k, v] : kv) c.set(k, v);
    return [c] { (void)make_run_config(c); };
  };
  CHECK_THROWS_AS(fails({{"g", "1"}, {"scattering_length_ratio", "1e-3"}})(), ConfigError);
  CHECK_THROWS_AS(fails({{"g", "-1"}})(), ConfigError);
  CHECK_THROWS_AS(fails({{"tau", "abc"}})(), ConfigError);
  CHECK_THROWS_AS(fails({{"kernels", "gpu"}})(), ConfigError);
  CHECK_THROWS_AS(fails({{"dt", "0.003"}})(), ConfigError);  // does not divide tau/2
  CHECK_THROWS_AS(fails({{"theta_count", "1"}})(), ConfigError);
  CHECK_THROWS_AS(fails({{"thetas_over_pi", "0.5"}, {"theta_count", "3"}})(), ConfigError);
  CHECK_THROWS_AS(fails({{"thetas_over_pi", "2.5"}})(), ConfigError);
  CHECK_THROWS_AS(fails({{"n_realizations", "1"}})(), ConfigError);
  CHECK_THROWS_AS(fails({{"parity", "none"}})(), ConfigError);
}

TEST_CASE("physical parameters set the coupling") {
  ConfigMap m;
  m.set("n_atoms", "1e3");
  m.set("scattering_length_ratio", "1e-3");
  m.set("trap_ratio", "10");
  m.set("transverse_ratio", "0.1");
  CHECK(make_run_config(m).coupling() == doctest::Approx(23.420026464629906).epsilon(1e-14));
}

TEST_CASE("theta range and lists") {
  ConfigMap m;
  m.set("theta_from_over_pi", "0.5");
  m.set("theta_to_over_pi", "1.5");
  m.set("theta_count", "5");
  const auto c = make_run_config(m);
  REQUIRE(c.thetas.size() == 5);
  CHECK(c.thetas.front() == doctest::Approx(0.5 * M_PI));
  CHECK(c.thetas[2] == doctest::Approx(M_PI));

  ConfigMap l;
  l.set("thetas_over_pi", "0, 0.25,1");
  CHECK(make_run_config(l).thetas.size() == 3);
}

TEST_CASE("config hash ignores where and how results are computed") {
  ConfigMap a, b;
  a.set("g", "10");
  b.set("g", "10");
  b.set("output_dir", "elsewhere");
  b.set("kernels", "serial");
  b.set("parallel_threshold", "0");
  CHECK(make_run_config(a).config_hash() == make_run_config(b).config_hash());
  b.set("seed", "2");
  CHECK(make_run_config(a).config_hash() != make_run_config(b).config_hash());
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
}

}  // TEST_SUITE
