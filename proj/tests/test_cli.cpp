#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_commands.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using horseshoe::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "horseshoe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("horseshoe_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string f; std::getline(in, f, ',');) v.push_back(f);
  return v;
}

std::string repeat(const std::string& line, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += line + "\n";
  return s;
}

}  // namespace

TEST_CASE("fit: all zeros with the MMLE") {
  TempDir dir;
  const auto in = dir.write("zeros.txt", repeat("0", 100));
  const auto r = cli({"fit", in, "--method", "eb_mmle"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls[0] == "# method: eb_mmle");
  CHECK(ls[1] == "# n: 100");
  CHECK(ls[2] == "# tau_hat: 0.01");
  CHECK(ls[3] == "# boundary: at_lower");
  CHECK(ls[4] == "index,y,post_mean,post_var");
  REQUIRE(ls.size() == 105);
  for (std::size_t i = 5; i < ls.size(); ++i) CHECK(split(ls[i])[2] == "0");
}

TEST_CASE("fit: simple estimator header") {
  TempDir dir;
  std::string text = repeat("0.25", 95) + "3.1\n-3.5\n4\n+7\n-10\n";
  const auto in = dir.write("five.txt", text);
  const auto r = cli({"fit", in, "--method", "eb_simple", "--c1", "2", "--c2", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# tau_hat: 0.05\n") != std::string::npos);
  CHECK(r.out.find("# c1: 2\n") != std::string::npos);
}

TEST_CASE("fit: output is deterministic and written to --out") {
  TempDir dir;
  const auto in = dir.write("y.txt", "0.5\n-1.2\n\n4.4\n 0.1 \n6\n0\n2.2\n");
  const auto a = dir.file("a.csv"), b = dir.file("b.csv");
  REQUIRE(cli({"fit", in, "--method", "hb", "--level", "0.9", "--out", a}).code == 0);
  REQUIRE(cli({"fit", in, "--method", "hb", "--level", "0.9", "--out", b, "--threads", "2"}).code == 0);
  CHECK(slurp(a) == slurp(b));
  const auto ls = lines(slurp(a));
  CHECK(ls[0] == "# method: hb_truncated_cauchy");
  CHECK(ls[2] == "# prior: truncated_cauchy");
  CHECK(ls[3] == "# grid_size: 400");
  CHECK(ls[4].rfind("# tau_posterior_mean: ", 0) == 0);
  CHECK(ls[5] == "# level: 0.9");
  CHECK(ls[6] == "index,y,post_mean,post_var,lower,upper");
  REQUIRE(ls.size() == 14);
  for (std::size_t i = 7; i < ls.size(); ++i) {
    const auto f = split(ls[i]);
    REQUIRE(f.size() == 6);
    CHECK(std::stod(f[4]) <= std::stod(f[5]));
  }
}

TEST_CASE("fit: method and prior spellings") {
  TempDir dir;
  const auto in = dir.write("y.txt", "0.5\n3\n-2\n0\n1\n");
  auto header = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"fit", in};
    args.insert(args.end(), extra.begin(), extra.end());
    const auto r = cli(args);
    REQUIRE(r.code == 0);
    return lines(r.out)[0];
  };
  CHECK(header({"--method", "hb_cauchy"}) == "# method: hb_half_cauchy");
  CHECK(header({"--method", "hb_uniform"}) == "# method: hb_uniform");
  CHECK(header({"--method", "hb", "--prior", "reciprocal"}) == "# method: hb_reciprocal");
  CHECK(cli({"fit", in, "--method", "hb_uniform", "--prior", "reciprocal"}).code == 2);
  CHECK(cli({"fit", in, "--method", "eb_mmle", "--prior", "uniform"}).code == 2);
  CHECK(cli({"fit", in, "--method", "hb_gamma"}).code == 2);
  CHECK(cli({"fit", in, "--method", "lasso"}).code == 2);
}

TEST_CASE("fit: validation happens before reading data") {
  const auto r = cli({"fit", "/nonexistent/file.txt", "--method", "eb_simple", "--c1", "-1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("c1") != std::string::npos);
  CHECK(cli({"fit", "/nonexistent/file.txt", "--level", "1.5"}).code == 2);
  CHECK(cli({"fit", "/nonexistent/file.txt", "--method", "hb", "--grid-size", "10"}).code == 2);
  const auto missing = cli({"fit", "/nonexistent/file.txt"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("cannot read") != std::string::npos);
}

TEST_CASE("fit: bad input reports the line") {
  TempDir dir;
  const auto bad = dir.write("bad.txt", "1.0\n2.0\nabc\n");
  const auto r = cli({"fit", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.txt:3") != std::string::npos);
  const auto inf = dir.write("inf.txt", "1.0\ninf\n");
  CHECK(cli({"fit", inf}).code == 2);
  const auto empty = dir.write("empty.txt", "\n\n");
  const auto e = cli({"fit", empty});
  CHECK(e.code == 2);
  CHECK(e.err.find("no observations") != std::string::npos);
}

TEST_CASE("profile marks the grid maximum") {
  TempDir dir;
  std::string text;
  for (int i = 0; i < 100; ++i) text += (i < 15 ? "10." : "0.") + std::to_string(i % 7) + "\n";
  const auto in = dir.write("y.txt", text);
  const auto r = cli({"profile", in, "--grid-size", "50"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  std::size_t header = 0;
  while (ls[header].rfind("#", 0) == 0) ++header;
  CHECK(ls[header] == "tau,log_likelihood,mmle");
  REQUIRE(ls.size() == header + 51);
  double best = -1e300, marked_value = 0.0, marked_tau = 0.0;
  int marked = 0;
  for (std::size_t i = header + 1; i < ls.size(); ++i) {
    const auto f = split(ls[i]);
    best = std::max(best, std::stod(f[1]));
    if (f[2] == "1") {
      ++marked;
      marked_value = std::stod(f[1]);
      marked_tau = std::stod(f[0]);
    }
  }
  CHECK(marked == 1);
  CHECK(marked_value == best);
  CHECK(marked_tau > 0.01);
  CHECK(marked_tau < 1.0);

  const auto one = cli({"profile", in, "--grid-size", "1"});
  REQUIRE(one.code == 0);
  const auto l1 = lines(one.out);
  CHECK(split(l1.back())[2] == "1");
}

TEST_CASE("simulate: figure4 preset, config files and errors") {
  TempDir dir;
  const auto out = dir.file("curve.csv");
  REQUIRE(cli({"simulate", "--preset", "figure4", "--out", out}).code == 0);
  const auto ls = lines(slurp(out));
  CHECK(ls[0] == "tau,e0_mtau,asymptote");
  CHECK(ls.size() == 41);
  CHECK(fs::exists(out + ".meta.json"));

  const auto cfg = dir.write("cfg.json", R"({"experiment": "figure2", "replications": 2, "p_values": [5, 20], "A_values": [4]})");
  const auto a = dir.file("a.csv"), b = dir.file("b.csv");
  REQUIRE(cli({"simulate", cfg, "--out", a}).code == 0);
  REQUIRE(cli({"simulate", cfg, "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(lines(slurp(a)).size() == 5);
  const auto meta = nlohmann::json::parse(slurp(a + ".meta.json"));
  CHECK(meta.at("config").at("experiment") == "figure2");
  REQUIRE(cli({"simulate", cfg, "--seed", "7", "--out", b}).code == 0);
  CHECK(slurp(a) != slurp(b));

  const auto unknown = cli({"simulate", "--preset", "figure7", "--out", out});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("figure2") != std::string::npos);
  CHECK(unknown.err.find("figure4") != std::string::npos);

  const auto badcfg = dir.write("bad.json", R"({"experiment": "figure3", "replications": 0})");
  const auto bad = cli({"simulate", badcfg, "--out", out});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("replications") != std::string::npos);
  CHECK(cli({"simulate", dir.file("nope.json"), "--out", out}).code == 2);
  CHECK(cli({"simulate", cfg, "--preset", "figure2", "--out", out}).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"fit"}).code == 2);
  CHECK(cli({"simulate", "--preset", "figure4"}).code == 2);
  CHECK(cli({"--threads", "0", "fit", "x"}).code == 2);
  const auto help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("fit") != std::string::npos);
}

TEST_CASE("installed binary: exit codes and stdout") {
  const char* exe = std::getenv("HORSESHOE_CLI");
  if (!exe) {
    MESSAGE("HORSESHOE_CLI not set; skipping the binary check");
    return;
  }
  TempDir dir;
  const auto in = dir.write("y.txt", "0\n1\n5\n");
  const auto out = dir.file("o.csv");
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  const std::string q = "'" + std::string(exe) + "'";
  CHECK(status(q + " fit " + in + " --out " + out) == 0);
  CHECK(slurp(out).rfind("# method: eb_mmle\n", 0) == 0);
  CHECK(status(q + " fit " + dir.write("bad.txt", "x\n")) == 2);
  CHECK(status(q + " simulate --preset nope --out " + out) == 2);
  CHECK(status(q + " --help") == 0);
}
