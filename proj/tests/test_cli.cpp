#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "udsp/cli.hpp"
#include "udsp/io.hpp"

namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Run {
  int code;
  std::string out, err;
};

auto run(std::vector<std::string> args) -> Run {
  std::ostringstream out, err;
  const int code = udsp::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("udsp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  auto file(const std::string &name) const -> std::string { return (path / name).string(); }
  auto write(const std::string &name, const std::string &content) const -> std::string {
    std::ofstream(path / name) << content;
    return file(name);
  }
};

auto slurp(const std::string &p) -> std::string { return udsp::read_text(p); }

} // namespace

TEST_CASE("number formatting is round-trip exact") {
  CHECK(udsp::format_double(0.1) == "0.10000000000000001");
  CHECK(udsp::format_double(1.0) == "1");
  CHECK(udsp::format_double(-2.5e-20) == "-2.4999999999999999e-20");
  CHECK(std::stod(udsp::format_double(-2.5e-20)) == -2.5e-20);
  CHECK(std::stod(udsp::format_double(3.0 / (2.0 * pi))) == 3.0 / (2.0 * pi));
}

TEST_CASE("unknown flags print usage and exit 1") {
  auto r = run({"design-filter", "--bogus", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  r = run({"no-such-command"});
  CHECK(r.code == 1);
  r = run({});
  CHECK(r.code == 1);
}

TEST_CASE("design-filter writes the kernel with h(0) = 3/(2 pi)") {
  TempDir dir;
  const auto csv = dir.file("kernel.csv");
  const auto r = run({"design-filter", "--kind", "lp", "--p", "1", "--q", "2", "--d", "1",
                      "--alpha", "0", "--omega-max", "16", "--n", "4096", "--out", csv});
  REQUIRE(r.code == 0);
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,re,im");
  bool found = false;
  while (std::getline(in, line)) {
    if (line.rfind("0,", 0) == 0) {
      found = true;
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      CHECK(std::abs(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) - 3.0 / (2.0 * pi)) < 1e-9);
    }
  }
  CHECK(found);
  const auto meta = nlohmann::json::parse(slurp(csv + ".json"));
  for (const char *key : {"p", "q", "d", "alpha", "rho_l1", "Omega_max", "n", "version", "config"})
    CHECK(meta.contains(key));
  CHECK(meta.at("config").at("omega_max") == 16.0);
  CHECK(meta.at("version") == udsp::kVersion);
  // No temporary files remain.
  std::size_t files = 0;
  for ([[maybe_unused]] const auto &e : fs::directory_iterator(dir.path))
    ++files;
  CHECK(files == 2);
}

TEST_CASE("identical runs give byte-identical files") {
  TempDir dir;
  const auto sig = dir.write("x.json", R"({"terms":[{"re":1,"im":0,"power":1,"freq":0.4},{"re":1,"im":0,"power":0,"freq":0.4}]})");
  const auto filt = dir.write("f.json", R"({"p":1,"q":2,"d":2,"kind":"lowpass","alpha":1})");
  for (const char *name : {"a.csv", "b.csv"}) {
    const auto r = run({"apply-filter", "--filter", filt, "--signal", sig, "--window=-20:20", "--n",
                        "401", "--out", dir.file(name)});
    REQUIRE(r.code == 0);
  }
  CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
  // Reports differ only in the echoed output path.
  auto rep = nlohmann::json::parse(slurp(dir.file("a.csv.json")));
  auto rep_b = nlohmann::json::parse(slurp(dir.file("b.csv.json")));
  CHECK(rep.at("config").at("out") == dir.file("a.csv"));
  rep["config"].erase("out");
  rep_b["config"].erase("out");
  CHECK(rep.dump() == rep_b.dump());
  CHECK(rep.at("gap_report").at("pass") == true);
}

TEST_CASE("window values may start with a minus sign") {
  TempDir dir;
  const auto sig = dir.write("x.json", R"({"terms":[{"re":1,"im":0,"power":0,"freq":0.4}]})");
  const auto r = run({"apply-filter", "--p", "1", "--q", "2", "--d", "1", "--signal", sig,
                      "--window", "-5:5", "--n", "11", "--no-gap-test", "--out", dir.file("y.csv")});
  CHECK(r.code == 0);
}

TEST_CASE("config file values are overridden by flags") {
  TempDir dir;
  const auto cfg = dir.write("cfg.json", R"({"design-filter":{"p":0.5,"q":3.0,"d":2,"alpha":1,"n":2048}})");
  const auto csv = dir.file("k.csv");
  const auto r = run({"design-filter", "--config", cfg, "--q", "2.5", "--out", csv});
  REQUIRE(r.code == 0);
  const auto meta = nlohmann::json::parse(slurp(csv + ".json"));
  CHECK(meta.at("p") == 0.5);
  CHECK(meta.at("q") == 2.5);
  CHECK(meta.at("n") == 2048);
  CHECK(meta.at("config").at("q") == 2.5);
}

TEST_CASE("predict rejects a non-member with its margin") {
  TempDir dir;
  const auto sig = dir.write("x.json", R"({"terms":[{"re":1,"im":0,"power":0,"freq":0}]})");
  const auto r = run({"predict", "--signal", sig, "--omega-hat", "0", "--out", dir.file("p.csv")});
  CHECK(r.code == 1);
  CHECK(r.err.find("margin = 0") != std::string::npos);
}

TEST_CASE("predict writes prediction and report") {
  TempDir dir;
  const auto sig = dir.write("x.json", R"({"terms":[{"re":1,"im":0,"power":0,"freq":1}]})");
  const auto r = run({"predict", "--a", "1", "--omega-hat", "0", "--gamma", "16", "--r", "0.5",
                      "--c", "1", "--alpha", "0.25", "--signal", sig, "--window=-10:10", "--n",
                      "201", "--convention", "printed", "--out", dir.file("p.csv")});
  REQUIRE(r.code == 0);
  const auto rep = nlohmann::json::parse(slurp(dir.file("p.csv.json")));
  CHECK(rep.at("route") == "spectral");
  CHECK(rep.at("predictor").at("convention") == "as_printed");
  CHECK(rep.at("sup_err").get<double>() < 1e-4);
}

TEST_CASE("divergent pairings exit with code 2") {
  TempDir dir;
  const auto sig = dir.write("x.json", R"({"terms":[{"re":1,"im":0,"power":2,"freq":0}]})");
  const auto r = run({"gap-test", "--signal", sig, "--edge", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("diverges") != std::string::npos);
}

TEST_CASE("gap-test and parseval-check emit JSON to stdout") {
  TempDir dir;
  const auto sig = dir.write("x.json", R"({"terms":[{"re":1,"im":0,"power":0,"freq":0.5}]})");
  auto r = run({"gap-test", "--signal", sig, "--gap-kind", "exterior", "--edge", "1"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("pass") == true);
  CHECK(j.at("probes").size() == 3);
  CHECK(j.contains("max_pairing"));
  CHECK(j.at("config").at("edge") == 1.0);

  r = run({"parseval-check", "--signal", sig, "--center", "0.5", "--half-width", "1"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j.at("abs_err").get<double>() < 1e-4);
}

TEST_CASE("sampled signals are accepted by gap-test") {
  TempDir dir;
  std::string csv = "t,re,im\n";
  for (int j = 0; j <= 8000; ++j) {
    const double t = -400.0 + 0.1 * j;
    csv += udsp::format_double(t) + "," + udsp::format_double(std::cos(0.5 * t)) + "," +
           udsp::format_double(std::sin(0.5 * t)) + "\n";
  }
  const auto sig = dir.write("x.csv", csv);
  const auto r = run({"gap-test", "--signal", sig, "--edge", "1", "--T", "300"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("max_pairing").get<double>() < 1e-2);
}

TEST_CASE("vgamma-study output") {
  TempDir dir;
  const auto out = dir.file("study.json");
  const auto r = run({"vgamma-study", "--gammas", "1,4", "--grid=-8:8:1024", "--out", out});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("entries").size() == 4);
  CHECK(j.at("config").at("gammas") == "1,4");
}

TEST_CASE("selftest on a subset") {
  const auto r = run({"selftest", "--only", "A1,A7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS A1") != std::string::npos);
  CHECK(r.out.find("PASS A7") != std::string::npos);
  CHECK(r.out.find("2/2") != std::string::npos);
}

TEST_CASE("invalid parameters exit with code 1") {
  TempDir dir;
  auto r = run({"design-filter", "--p", "2", "--q", "1", "--out", dir.file("k.csv")});
  CHECK(r.code == 1);
  r = run({"design-filter", "--p", "1", "--q", "2", "--d", "1", "--alpha", "0", "--n", "1000",
           "--out", dir.file("k.csv")});
  CHECK(r.code == 1);
  r = run({"apply-filter", "--signal", dir.file("missing.json"), "--out", dir.file("y.csv")});
  CHECK(r.code == 1);
}
