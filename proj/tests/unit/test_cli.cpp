#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mongerays/cli.hpp"
#include "mongerays/io.hpp"

using namespace mongerays;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "mongerays");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mongerays_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> tripod_args(const std::string& sub) {
  return {sub, "--space", fixture("tripod_space.json"), "--mu0", fixture("tripod_mu0.json"),
          "--mu1", fixture("tripod_mu1.json")};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("tripod solve-monge") {
    const auto r = call(tripod_args("solve-monge"));
    REQUIRE(r.code == 0);
    const Json doc = Json::parse(r.out);
    CHECK(std::abs(doc["gap"].get<double>()) <= 1e-9);
    CHECK(doc["cost"].get<double>() == doctest::Approx(2.0));
    CHECK(doc["aplus"] == Json::array({"u", "c"}));
    CHECK(doc["aminus"].empty());
    CHECK(doc["is_map"] == false);
    CHECK(doc["virtual_map"].size() == 2);
  }

  TEST_CASE("generate is reproducible") {
    const std::vector<std::string> args{"generate", "--model", "sphere2_sample", "--n", "500", "--seed", "7"};
    const auto a = call(args), b = call(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const Json doc = Json::parse(a.out);
    CHECK(doc["model"]["kind"] == "sphere2_sample");
    const auto c = call({"generate", "--model", "sphere2_sample", "--n", "500", "--seed", "8"});
    CHECK(c.out != a.out);
  }

  TEST_CASE("solve, decompose and check-curvature chain") {
    const fs::path dir = scratch("chain");
    const auto space = (dir / "space.json").string();
    const auto mu0 = (dir / "mu0.json").string(), mu1 = (dir / "mu1.json").string();
    REQUIRE(call({"generate", "--model", "interval", "--n", "8", "--size", "1", "--out", space,
                  "--mu0-out", mu0, "--mu1-out", mu1}).code == 0);
    const auto sol = (dir / "sol.json").string();
    REQUIRE(call({"solve", "--space", space, "--mu0", mu0, "--mu1", mu1, "--out", sol}).code == 0);
    const Json s = read_json_file(sol);
    CHECK(std::abs(s["w1"].get<double>() - s["dual_value"].get<double>()) <= 1e-9);

    const auto d = call({"decompose", "--solution", sol});
    REQUIRE(d.code == 0);
    const Json dec = Json::parse(d.out);
    CHECK(dec["classes"].size() == 1);
    CHECK(dec["aplus"].empty());

    const auto csv = (dir / "mcp.csv").string();
    const auto dens = (dir / "density.csv").string();
    const auto c = call({"check-curvature", "--solution", sol, "--delta", "0", "--times", "0,0.5,1", "--out", csv,
                         "--density-out", dens});
    REQUIRE(c.code == 0);
    const std::string table = slurp(csv);
    CHECK(table.rfind("t,residual\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 4);
    CHECK(fs::exists(dens));

    const auto rep = (dir / "report").string();
    REQUIRE(call({"report", "--space", space, "--mu0", mu0, "--mu1", mu1, "--out-dir", rep}).code == 0);
    CHECK(fs::exists(fs::path(rep) / "rays.csv"));
    CHECK(fs::exists(fs::path(rep) / "branch.csv"));
    CHECK(fs::exists(fs::path(rep) / "duality.json"));
  }

  TEST_CASE("input errors exit with 2") {
    const fs::path dir = scratch("errors");
    CHECK(call({"solve", "--space", (dir / "missing.json").string(), "--mu0", fixture("tripod_mu0.json"), "--mu1",
                fixture("tripod_mu1.json")}).code == 2);
    std::ofstream(dir / "bad.json") << "{not json";
    CHECK(call({"solve", "--space", (dir / "bad.json").string(), "--mu0", fixture("tripod_mu0.json"), "--mu1",
                fixture("tripod_mu1.json")}).code == 2);
    std::ofstream(dir / "asym.json") << R"({"points":["a","b"],"dist":[[0,1],[2,0]]})";
    std::ofstream(dir / "a.json") << R"({"mass":{"a":1}})";
    std::ofstream(dir / "b.json") << R"({"mass":{"b":1}})";
    const auto asym = call({"solve", "--space", (dir / "asym.json").string(), "--mu0", (dir / "a.json").string(),
                            "--mu1", (dir / "b.json").string()});
    CHECK(asym.code == 2);
    CHECK(asym.err.find("AsymmetricDistance") != std::string::npos);
    std::ofstream(dir / "sym.json") << R"({"points":["a","b"],"dist":[[0,1],[1,0]]})";
    CHECK(call({"solve", "--space", (dir / "sym.json").string(), "--mu0", (dir / "a.json").string(), "--mu1",
                (dir / "b.json").string()}).code == 0);
    CHECK(call({"frobnicate"}).code == 2);
    auto neg = tripod_args("solve-monge");
    neg.insert(neg.end(), {"--eps-gamma", "-1"});
    CHECK(call(neg).code == 2);
    CHECK(call({"generate", "--model", "torus"}).code == 2);
  }

  TEST_CASE("numeric and invariant failures") {
    const fs::path dir = scratch("failures");
    const auto space = (dir / "space.json").string();
    const auto mu0 = (dir / "mu0.json").string(), mu1 = (dir / "mu1.json").string();
    REQUIRE(call({"generate", "--model", "interval", "--n", "8", "--size", "10", "--out", space,
                  "--mu0-out", mu0, "--mu1-out", mu1}).code == 0);
    const auto sol = (dir / "sol.json").string();
    REQUIRE(call({"solve", "--space", space, "--mu0", mu0, "--mu1", mu1, "--out", sol}).code == 0);
    CHECK(call({"check-curvature", "--solution", sol, "--delta", "0", "--K", "1", "--N", "2"}).code == 3);

    const auto sph = (dir / "sphere.json").string();
    const auto s0 = (dir / "s0.json").string(), s1 = (dir / "s1.json").string();
    REQUIRE(call({"generate", "--model", "sphere2_sample", "--n", "200", "--out", sph, "--mu0-out", s0,
                  "--mu1-out", s1}).code == 0);
    CHECK(call({"solve-monge", "--space", sph, "--mu0", s0, "--mu1", s1, "--max-gap", "1e-9"}).code == 0);
    CHECK(call({"solve-monge", "--space", sph, "--mu0", s0, "--mu1", s1, "--max-gap", "1e-300"}).code == 4);
  }

  TEST_CASE("selftest is deterministic") {
    const fs::path a = scratch("self_a"), b = scratch("self_b");
    const auto ra = call({"selftest", "--out-dir", a.string()});
    const auto rb = call({"selftest", "--out-dir", b.string()});
    CHECK(ra.code == 0);
    CHECK(ra.out == rb.out);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
    CHECK(files >= 5);
  }
}
