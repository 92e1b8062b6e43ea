#include <doctest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, bool want_stderr = false) {
  const std::string cmd = std::string(RUELLE_BINARY) + " " + args + (want_stderr ? " 2>&1 >/dev/null" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "ruelle_cli_test";
  fs::create_directories(d);
  return d;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / (name + ".yaml");
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("dim on bundled configs") {
  const Run ex = run("dim --config example_paper");
  REQUIRE(ex.code == 0);
  const json j = json::parse(ex.out);
  CHECK(std::abs(j["a"].get<double>() - 0.5) <= 1e-8);
  CHECK(j["certified"].get<bool>());
  CHECK(j["a_bracket"][0].get<double>() <= 0.5);
  CHECK(j["a_bracket"][1].get<double>() >= 0.5);

  const Run c = run("dim --config cantor3");
  REQUIRE(c.code == 0);
  CHECK(std::abs(json::parse(c.out)["a"].get<double>() - std::log(2.0) / std::log(3.0)) <= 1e-10);
}

TEST_CASE("dim without a root exits 2") {
  const fs::path p = write_config("expanding", "family:\n  kind: explicit_affine\n  maps: [[1, 0]]\n  domain: [0, 1]\n");
  const Run r = run("dim --config " + p.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("no-root-in-range") != std::string::npos);
}

TEST_CASE("config diagnostics") {
  const fs::path bad = write_config("bad_value", "family:\n  kind: explicit_affine\n  maps: [[1/3, 0]]\nnumerics:\n  grid: many\n");
  const Run r = run("dim --config " + bad.string(), true);
  CHECK(r.code == 1);
  CHECK(r.out.find("bad_value.yaml:5:") != std::string::npos);
  CHECK(r.out.find("numerics.grid") != std::string::npos);

  const fs::path unknown = write_config("unknown_key", "family:\n  kind: explicit_affine\n  maps: [[1/3, 0]]\n  colour: red\n");
  const Run u = run("dim --config " + unknown.string(), true);
  CHECK(u.code == 1);
  CHECK(u.out.find("unknown_key.yaml:4: family.colour: unknown key") != std::string::npos);

  const fs::path small = write_config("small_grid", "family:\n  kind: explicit_affine\n  maps: [[1/3, 0]]\nnumerics:\n  grid: 1\n");
  CHECK(run("eigen --config " + small.string()).code == 1);
  CHECK(run("dim --config no_such_config").code == 1);
  CHECK(run("frobnicate").code == 1);
}

TEST_CASE("eigen records") {
  const Run ex = run("eigen --config example_paper --s 0.5");
  REQUIRE(ex.code == 0);
  const json j = json::parse(ex.out);
  CHECK(std::abs(j["rho"].get<double>() - 1.0) <= 1e-9);
  CHECK(j["rho_bracket_with_tail"][0].get<double>() <= 1.0);
  CHECK(j["rho_bracket_with_tail"][1].get<double>() >= 1.0);
  const auto hv = j["h"]["values"].get<std::vector<double>>();
  const auto [lo, hi] = std::minmax_element(hv.begin(), hv.end());
  CHECK((*hi - *lo) / *hi <= 1e-6);

  const Run g = run("eigen --config gauss_full --s 1 --grid 4096");
  REQUIRE(g.code == 0);
  const json jg = json::parse(g.out);
  const auto gv = jg["h"]["values"].get<std::vector<double>>();
  const double glo = jg["h"]["grid"]["lo"].get<double>(), ghi = jg["h"]["grid"]["hi"].get<double>();
  const std::size_t m = gv.size();
  // Normalize both at the first node and compare against 1/(1+x).
  double worst = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double x = glo + (ghi - glo) * static_cast<double>(k) / static_cast<double>(m - 1);
    const double expect = (1.0 + glo) / (1.0 + x);
    worst = std::max(worst, std::abs(gv[k] / gv[0] - expect) / expect);
  }
  CHECK(worst <= 1e-6);

  const Run c = run("eigen --config cantor3");
  REQUIRE(c.code == 0);
  CHECK(std::abs(json::parse(c.out)["pairing"].get<double>() - 1.0) <= 1e-8);
}

TEST_CASE("pressure sweeps") {
  const Run c = run("pressure --config cantor3");
  REQUIRE(c.code == 0);
  const auto rows = csv_rows(c.out);
  REQUIRE(rows.size() == 11);
  CHECK(rows[0] == std::vector<std::string>{"s", "lower", "log_rho", "upper"});
  double prev = INFINITY;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double s = std::stod(rows[k][0]), lr = std::stod(rows[k][2]);
    CHECK(std::abs(lr - (std::log(2.0) - s * std::log(3.0))) <= 1e-12);
    CHECK(lr < prev);
    prev = lr;
  }

  const Run ex = run("pressure --config example_paper");
  REQUIRE(ex.code == 0);
  for (const auto& row : csv_rows(ex.out)) {
    if (row[0] == "0.25") CHECK(std::abs(std::stod(row[2]) - std::log(std::pow(2.0, -0.5) / (1 - std::pow(2.0, -0.5)))) <= 1e-6);
    if (row[0] == "0.5") CHECK(std::abs(std::stod(row[2])) <= 1e-9);
  }

  const Run below = run("pressure --config example_paper --s-min 0.1 --s-max 0.2 --steps 2");
  CHECK(below.out.find("divergent") == std::string::npos);
  const Run div = run("pressure --config gauss_full --s-min 0.3 --s-max 0.45 --steps 2");
  CHECK(div.out.find("divergent") != std::string::npos);
}

TEST_CASE("osc records") {
  const Run ex = run("osc --config example_paper --n 8 --candidate 0,1");
  REQUIRE(ex.code == 0);
  const json j = json::parse(ex.out);
  CHECK(j["fosc"] == "pass");
  CHECK(j["strong"] == "pass");
  CHECK(std::abs(j["witness"]["x"].get<double>() - 1.0 / 3) <= 1e-15);

  const Run ov = run("osc --config overlap_demo");
  const json jo = json::parse(ov.out);
  CHECK(jo["fosc"] == "fail");
  REQUIRE(jo["violations"].size() == 1);
  CHECK(jo["violations"][0]["interval"][0].get<double>() == 0.25);
  CHECK(jo["violations"][0]["interval"][1].get<double>() == 0.5);

  const Run su = run("osc --config cantor3 --suggest");
  const json js = json::parse(su.out);
  CHECK(js["fosc"] == "pass");
  CHECK(js["candidate"][0][0].get<double>() == 0.0);
  CHECK(js["candidate"][0][1].get<double>() == 1.0);
}

TEST_CASE("attractor records, overrides and side files") {
  const fs::path dir = scratch_dir() / "plots";
  fs::remove_all(dir);
  const Run a = run("attractor --config example_paper --count 2000 --emit-plot-data " + dir.string());
  REQUIRE(a.code == 0);
  const json j = json::parse(a.out);
  CHECK(j["points"]["count"].get<std::size_t>() == 2000);
  CHECK(j["points"]["hull"][0].get<double>() > 0.0);
  CHECK(j["points"]["hull"][1].get<double>() <= 0.5 + 1e-10);
  const std::string pts = slurp(dir / "points.csv");
  CHECK(pts.rfind("x\n", 0) == 0);
  CHECK(fs::exists(dir / "cover.csv"));

  const Run b = run("attractor --config example_paper --count 2000 --emit-plot-data " + dir.string() + " --workers 2");
  CHECK(a.out == b.out);
  CHECK(slurp(dir / "points.csv") == pts);
  const Run other = run("attractor --config example_paper --count 2000 --seed 2");
  CHECK(json::parse(other.out)["points"]["seed"].get<std::uint64_t>() == 2);
  CHECK(other.out != b.out);

  const Run g = run("eigen --config example_paper --grid 64 --truncate 20");
  const json jg = json::parse(g.out);
  CHECK(jg["h"]["grid"]["size"].get<std::size_t>() == 64);
  CHECK(jg["truncation"].get<std::size_t>() == 20);

  const fs::path trace = scratch_dir() / "trace.csv";
  fs::remove(trace);
  CHECK(run("eigen --config cantor3 --trace " + trace.string()).code == 0);
  CHECK(fs::exists(trace));
  CHECK(csv_rows(slurp(trace)).size() > 1);
}

TEST_CASE("configs listing") {
  const Run r = run("configs");
  CHECK(r.code == 0);
  for (const char* name : {"example_paper", "cantor3", "gauss_full", "gauss_digits_12", "overlap_demo"})
    CHECK(r.out.find(name) != std::string::npos);
}
