#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bhv/cli.hpp"

using namespace bhv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("bhv_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  return {std::istreambuf_iterator<char>(is), {}};
}

}  // namespace

TEST_CASE("exit codes", "[cli]") {
  SECTION("no arguments prints usage") {
    const auto r = invoke({});
    REQUIRE(r.code == kExitUsage);
    REQUIRE(r.err.find("Usage:") != std::string::npos);
  }
  SECTION("help") { REQUIRE(invoke({"--help"}).code == kExitPass); }
  SECTION("unknown flag") { REQUIRE(invoke({"verify", "--bogus"}).code == kExitUsage); }
  SECTION("unknown subcommand") { REQUIRE(invoke({"prove"}).code == kExitUsage); }
  SECTION("unsupported format") { REQUIRE(invoke({"verify", "--format", "xml"}).code == kExitUsage); }
  SECTION("unknown identity") { REQUIRE(invoke({"verify", "--ids", "I1,I99"}).code == kExitUsage); }
  SECTION("bad values are rejected before computing") {
    REQUIRE(invoke({"radial", "--grid", "10by10"}).code == kExitUsage);
    REQUIRE(invoke({"radial", "--alpha", "1"}).code == kExitUsage);
    REQUIRE(invoke({"scan-pd", "--n", "3..9"}).code == kExitUsage);
    REQUIRE(invoke({"oracle", "--samples", "0"}).code == kExitUsage);
    REQUIRE(invoke({"oracle", "--dims", "4"}).code == kExitUsage);
    REQUIRE(invoke({"params", "--n-max", "4"}).code == kExitUsage);
    REQUIRE(invoke({"verify", "--mutate", "I6:99:1"}).code == kExitUsage);
  }
}

TEST_CASE("verify subcommand", "[cli]") {
  SECTION("pristine registry passes") {
    const auto r = invoke({"verify"});
    REQUIRE(r.code == kExitPass);
    const Json j = Json::parse(r.out);
    REQUIRE(j["schema"] == kReportSchema);
    REQUIRE(j["status"] == "pass");
    REQUIRE(j["sections"]["verify"]["verified"] == 15);
    REQUIRE(j["sections"]["verify"]["total"] == 15);
    REQUIRE(j["sections"]["verify"]["combination"]["ok"] == true);
    // Printed-form deviations are findings, not failures.
    REQUIRE(j["errata"].size() == 2);
  }
  SECTION("a mutated identity fails with its residual listed") {
    const auto r = invoke({"verify", "--mutate", "I6:0:1"});
    REQUIRE(r.code == kExitMathFailure);
    const Json j = Json::parse(r.out);
    REQUIRE(j["status"] == "fail");
    const auto& ids = j["sections"]["verify"]["identities"];
    const auto it = std::find_if(ids.begin(), ids.end(), [](const Json& x) { return x["id"] == "I6*"; });
    REQUIRE(it != ids.end());
    REQUIRE((*it)["status"] == "residual");
    REQUIRE_FALSE((*it)["residual_terms"].empty());
    REQUIRE(r.err.find("I6*") != std::string::npos);
  }
  SECTION("id selection and mode override") {
    const Json j = Json::parse(invoke({"verify", "--ids", "I2,I3", "--mode", "free"}).out);
    REQUIRE(j["sections"]["verify"]["total"] == 2);
    REQUIRE_FALSE(j["sections"]["verify"].contains("combination"));
    for (const auto& id : j["sections"]["verify"]["identities"]) REQUIRE(id["mode"] == "free");
  }
}

TEST_CASE("other subcommands", "[cli]") {
  SECTION("params keeps errata out of the status") {
    const auto r = invoke({"params", "--n-max", "8"});
    REQUIRE(r.code == kExitPass);
    const Json j = Json::parse(r.out);
    REQUIRE(j["sections"]["params"]["certified"] == 4);
    REQUIRE(j["sections"]["params"]["exponent"]["points"] == 400);
    REQUIRE(j["sections"]["params"]["exponent"]["chain_holds"] == 380);
    REQUIRE(j["errata"].size() == 2);
  }
  SECTION("scan-pd") {
    const Json j = Json::parse(invoke({"scan-pd", "--n", "5..7", "--grid", "50"}).out);
    REQUIRE(j["sections"]["scan_pd"]["points"] == 150);
    REQUIRE(j["sections"]["scan_pd"]["agreements"] == 150);
  }
  SECTION("oracle flags the cited constant") {
    const auto r = invoke({"oracle", "--samples", "20", "--dims", "5", "--sharp-dims", "5", "--sharp-restarts", "16"});
    REQUIRE(r.code == kExitPass);
    const Json j = Json::parse(r.out);
    REQUIRE(j["sections"]["oracle"]["checks"].size() == registry().size());
    REQUIRE(j["sections"]["oracle"]["sharp_constant"][0]["below_cited"] == true);
    REQUIRE(j["errata"].size() == 1);
  }
  SECTION("an impossible tolerance fails and serializes the jet") {
    const auto r = invoke({"oracle", "--samples", "5", "--dims", "5", "--tol", "1e-300", "--sharp-dims", "5", "--sharp-restarts", "4"});
    REQUIRE(r.code == kExitMathFailure);
    const Json j = Json::parse(r.out);
    bool has_jet = false;
    for (const auto& c : j["sections"]["oracle"]["checks"]) has_jet = has_jet || c.contains("failing_jet");
    REQUIRE(has_jet);
  }
  SECTION("radial single case and trajectory dump") {
    const auto dir = temp_dir("traj");
    const auto r = invoke({"radial", "--n", "6", "--alpha", "2", "--grid", "2x3", "--dump-trajectories", "--dump-dir", dir.string()});
    REQUIRE(r.code == kExitPass);
    const Json j = Json::parse(r.out);
    REQUIRE(j["sections"]["radial"]["scans"].size() == 1);
    REQUIRE(j["sections"]["radial"]["scans"][0]["cells"].size() == 6);
    REQUIRE(j["sections"]["radial"]["scans"][0]["survivors"] == 0);
    REQUIRE(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 6);
    REQUIRE_FALSE(j["sections"]["radial"]["scans"][0].contains("seconds"));
  }
}

TEST_CASE("output and config", "[cli]") {
  const auto dir = temp_dir("out");
  SECTION("--out writes the report and leaves no temporary") {
    const auto path = dir / "report.md";
    const auto r = invoke({"verify", "--ids", "I1", "--format", "markdown", "--out", path.string()});
    REQUIRE(r.code == kExitPass);
    REQUIRE(r.out.empty());
    REQUIRE(slurp(path).find("<a id=\"I1\"></a>") != std::string::npos);
    REQUIRE_FALSE(fs::exists(dir / "report.md.tmp"));
  }
  SECTION("config file values, overridden by flags") {
    const auto cfg = dir / "bhv.ini";
    std::ofstream(cfg) << "format=markdown\n[radial]\ngrid=2x2\ncases=6:2\nrmax=20\n";
    const auto a = invoke({"radial", "--config", cfg.string()});
    REQUIRE(a.code == kExitPass);
    REQUIRE(a.out.rfind("# Verification report", 0) == 0);
    const Json j = Json::parse(invoke({"radial", "--config", cfg.string(), "--format", "json", "--rmax", "10"}).out);
    REQUIRE(j["config"]["radial"]["rmax"] == 10.0);
    REQUIRE(j["config"]["radial"]["grid"] == "2x2");
  }
  SECTION("environment config path") {
    const auto cfg = dir / "env.ini";
    std::ofstream(cfg) << "params.n-max=6\n";
    ::setenv("BHV_CONFIG", cfg.string().c_str(), 1);
    const auto r = invoke({"params"});
    ::setenv("BHV_CONFIG", (dir / "missing.ini").string().c_str(), 1);
    const auto missing = invoke({"params"});
    ::unsetenv("BHV_CONFIG");
    REQUIRE(r.code == kExitPass);
    REQUIRE(Json::parse(r.out)["sections"]["params"]["n_max"] == 6);
    REQUIRE(missing.code == kExitUsage);
  }
  SECTION("missing config file on the command line") { REQUIRE(invoke({"verify", "--config", (dir / "nope.ini").string()}).code == kExitUsage); }
  SECTION("all runs every section") {
    const auto cfg = dir / "small.ini";
    std::ofstream(cfg) << "params.n-max=6\nscan-pd.n=5..6\nscan-pd.grid=20\noracle.samples=5\noracle.dims=5\noracle.sharp-dims=5\n"
                          "oracle.sharp-restarts=4\nradial.grid=2x2\nradial.cases=6:2\n";
    const auto r = invoke({"all", "--config", cfg.string()});
    REQUIRE(r.code == kExitPass);
    const Json j = Json::parse(r.out);
    REQUIRE(j["sections"].size() == 5);
    REQUIRE(j["config"]["oracle"]["samples"] == 5);
  }
}

TEST_CASE("rendering", "[cli][report]") {
  RunConfig c;
  c.subcommand = "oracle";
  c.samples = 10;
  c.dims = {5};
  c.sharp_dims = {5};
  c.sharp_restarts = 4;
  SECTION("fixed input renders to identical bytes") {
    const Json a = build_report(c), b = build_report(c);
    REQUIRE(render_json(a) == render_json(b));
    REQUIRE(render_markdown(a) == render_markdown(b));
  }
  SECTION("json round trip") {
    const Json a = build_report(c);
    REQUIRE(Json::parse(render_json(a)) == a);
  }
  SECTION("empty result arrays give a minimal valid document") {
    const Json r = make_report(Json::object(), Json::object());
    REQUIRE(r["status"] == "pass");
    REQUIRE(Json::parse(render_json(r)) == r);
    REQUIRE(render_markdown(r).find("status: **pass**") != std::string::npos);
    Json empty_scan = radial_section({{}, 10, 10});
    REQUIRE(empty_scan["scans"].empty());
    REQUIRE(empty_scan["ok"] == true);
  }
  SECTION("unsupported format") { REQUIRE_THROWS_AS(render_report(Json::object(), "html"), ParameterRange); }
  SECTION("markdown carries identity anchors") {
    RunConfig v;
    v.subcommand = "verify";
    const std::string md = render_markdown(build_report(v));
    for (const auto& id : registry()) REQUIRE(md.find("<a id=\"" + id.id + "\"></a>") != std::string::npos);
  }
}
