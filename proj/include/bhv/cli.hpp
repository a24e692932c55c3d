#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bhv/report.hpp"

namespace bhv {

/// Exit codes of `run`.
enum ExitCode { kExitPass = 0, kExitMathFailure = 1, kExitUsage = 2 };

struct RunConfig {
  std::string subcommand;
  std::string format = "json";
  std::string out;
  bool timings = false;

  std::vector<std::string> ids;
  std::string mode;
  std::vector<std::string> mutations;

  int n_max = 100;

  std::string n_range = "5..100";
  int pd_grid = 1000;

  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  std::vector<int> dims = {5, 6, 8};
  double tol = 1e-9;
  std::vector<int> sharp_dims = {5, 6, 7, 8};
  std::size_t sharp_restarts = 64;

  int radial_n = 0;
  double radial_alpha = 0;
  std::string cases = "5:2,6:2,6:3,8:2";
  std::string radial_grid = "10x10";
  double rmax = 50;
  bool dump_trajectories = false;
  std::string dump_dir = "trajectories";
};

namespace detail {

inline int parse_int(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != s.size()) throw ParameterRange("bad " + what + ": '" + s + "'");
  return v;
}

inline double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != s.size()) throw ParameterRange("bad " + what + ": '" + s + "'");
  return v;
}

/// "lo..hi" or a single integer.
inline std::pair<int, int> parse_n_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const int n = parse_int(s, "n");
    return {n, n};
  }
  return {parse_int(s.substr(0, dots), "n range"), parse_int(s.substr(dots + 2), "n range")};
}

/// "AxB" with A points in u0 and B points in v0.
inline std::pair<int, int> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw ParameterRange("grid must look like 10x10, got '" + s + "'");
  return {parse_int(s.substr(0, x), "grid"), parse_int(s.substr(x + 1), "grid")};
}

/// "n:alpha,n:alpha,..."
inline std::vector<RadialCase> parse_cases(const std::string& s) {
  std::vector<RadialCase> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto c = item.find(':');
    if (c == std::string::npos) throw ParameterRange("case must look like 6:2, got '" + item + "'");
    out.push_back({parse_int(item.substr(0, c), "case n"), parse_double(item.substr(c + 1), "case alpha")});
  }
  return out;
}

/// "ID:TERM:DELTA", for example "I6:0:1/2".
inline Mutation parse_mutation(const std::string& s) {
  const auto a = s.find(':');
  const auto b = a == std::string::npos ? a : s.find(':', a + 1);
  if (b == std::string::npos) throw ParameterRange("mutation must look like ID:TERM:DELTA, got '" + s + "'");
  Mutation m{s.substr(0, a), static_cast<std::size_t>(parse_int(s.substr(a + 1, b - a - 1), "mutation term")), s.substr(b + 1)};
  const Identity& id = find_identity(m.id);
  if (m.term >= id.rhs.size()) throw ParameterRange("mutation term out of range for " + m.id);
  P(m.delta);
  return m;
}

inline VerifyOptions verify_options(const RunConfig& c) {
  VerifyOptions o;
  o.ids = c.ids;
  for (const auto& id : o.ids) find_identity(id);
  if (c.mode == "free")
    o.mode = SubstitutionMode::Free;
  else if (c.mode == "onshell")
    o.mode = SubstitutionMode::OnShell;
  for (const auto& m : c.mutations) o.mutations.push_back(parse_mutation(m));
  return o;
}

inline ScanPdOptions scan_pd_options(const RunConfig& c) {
  const auto [lo, hi] = parse_n_range(c.n_range);
  if (lo < 5 || hi < lo) throw ParameterRange("n range must satisfy 5 <= lo <= hi");
  if (c.pd_grid < 1) throw ParameterRange("grid must be positive");
  return {lo, hi, c.pd_grid};
}

inline OracleOptions oracle_options(const RunConfig& c) {
  OracleOptions o{c.seed, c.samples, c.dims, c.tol, c.sharp_dims, c.sharp_restarts};
  if (o.samples == 0) throw ParameterRange("samples must be positive");
  if (!(o.tol > 0)) throw ParameterRange("tol must be positive");
  for (int n : o.dims)
    if (n < 5) throw ParameterRange("oracle dims must be >= 5");
  for (int n : o.sharp_dims)
    if (n < 2) throw ParameterRange("sharp dims must be >= 2");
  return o;
}

inline RadialOptions radial_options(const RunConfig& c) {
  RadialOptions o;
  if (c.radial_n != 0 || c.radial_alpha != 0)
    o.cases = {{c.radial_n != 0 ? c.radial_n : 6, c.radial_alpha != 0 ? c.radial_alpha : 2.0}};
  else
    o.cases = parse_cases(c.cases);
  std::tie(o.u0_count, o.v0_count) = parse_grid(c.radial_grid);
  o.rmax = c.rmax;
  if (c.dump_trajectories) o.dump_dir = c.dump_dir;
  if (o.u0_count < 1 || o.v0_count < 1) throw ParameterRange("grid sizes must be positive");
  if (!(o.rmax > 0)) throw ParameterRange("rmax must be positive");
  for (const auto& rc : o.cases)
    if (rc.n < 5 || !(rc.alpha > 1)) throw ParameterRange("radial cases need n >= 5 and alpha > 1");
  return o;
}

inline Json config_echo(const RunConfig& c) {
  Json j{{"subcommand", c.subcommand}, {"format", c.format}};
  const bool all = c.subcommand == "all";
  if (all || c.subcommand == "verify") {
    j["verify"] = {{"ids", c.ids}, {"mode", c.mode.empty() ? "registered" : c.mode}};
    if (!c.mutations.empty()) j["verify"]["mutations"] = c.mutations;
  }
  if (all || c.subcommand == "params") j["params"] = {{"n_max", c.n_max}};
  if (all || c.subcommand == "scan-pd") j["scan_pd"] = {{"n", c.n_range}, {"grid", c.pd_grid}};
  if (all || c.subcommand == "oracle")
    j["oracle"] = {{"seed", c.seed}, {"samples", c.samples}, {"dims", c.dims}, {"tol", c.tol}, {"sharp_dims", c.sharp_dims}, {"sharp_restarts", c.sharp_restarts}};
  if (all || c.subcommand == "radial") {
    const auto o = radial_options(c);
    Json cases = Json::array();
    for (const auto& rc : o.cases) cases.push_back({{"n", rc.n}, {"alpha", rc.alpha}});
    j["radial"] = {{"cases", cases}, {"grid", c.radial_grid}, {"rmax", c.rmax}, {"dump_trajectories", c.dump_trajectories}};
  }
  return j;
}

}  // namespace detail

/// Runs the computations selected by `c` and returns the report.
inline Json build_report(const RunConfig& c) {
  const bool all = c.subcommand == "all";
  // Validate every option before computing anything.
  std::optional<VerifyOptions> vo;
  std::optional<ScanPdOptions> po;
  std::optional<OracleOptions> oo;
  std::optional<RadialOptions> ro;
  if (all || c.subcommand == "verify") vo = detail::verify_options(c);
  if ((all || c.subcommand == "params") && c.n_max < 5) throw ParameterRange("n-max must be >= 5");
  if (all || c.subcommand == "scan-pd") po = detail::scan_pd_options(c);
  if (all || c.subcommand == "oracle") oo = detail::oracle_options(c);
  if (all || c.subcommand == "radial") ro = detail::radial_options(c);
  const Json config = detail::config_echo(c);

  Json sections = Json::object();
  if (vo) sections["verify"] = verify_section(*vo);
  if (all || c.subcommand == "params") sections["params"] = params_section({c.n_max});
  if (po) sections["scan_pd"] = scan_pd_section(*po);
  if (oo) sections["oracle"] = oracle_section(*oo);
  if (ro) sections["radial"] = radial_section(*ro, c.timings);
  return make_report(config, std::move(sections));
}

/// Command-line entry point; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app("Exact and numeric verification engine for the biharmonic Liouville argument", "bhv");
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value config file; [section] or section.key for subcommand options")->envname("BHV_CONFIG");
  app.add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "markdown"}))->capture_default_str();
  app.add_option("--out", c.out, "Write the report to PATH instead of stdout");
  app.add_flag("--timings", c.timings, "Include wall-clock timings (makes the report non-deterministic)");
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "Symbolic identity suite");
  verify->add_option("--ids", c.ids, "Comma-separated identity ids")->delimiter(',');
  verify->add_option("--mode", c.mode, "Override the substitution mode")->check(CLI::IsMember({"free", "onshell"}));
  verify->add_option("--mutate", c.mutations, "ID:TERM:DELTA coefficient shift (testing only)")->group("");

  auto* params = app.add_subcommand("params", "Formula checks, sign certificates and exponent arithmetic");
  params->add_option("--n-max", c.n_max, "Largest n to certify")->capture_default_str();

  auto* scan_pd = app.add_subcommand("scan-pd", "Numeric lambda_min scan of the quadratic form");
  scan_pd->add_option("--n", c.n_range, "n range lo..hi")->capture_default_str();
  scan_pd->add_option("--grid", c.pd_grid, "alpha points per n")->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "Random-jet numeric checks and sharp-constant probe");
  oracle->add_option("--seed", c.seed)->capture_default_str();
  oracle->add_option("--samples", c.samples, "Jets per identity and dimension")->capture_default_str();
  oracle->add_option("--dims", c.dims, "Comma-separated dimensions")->delimiter(',')->capture_default_str();
  oracle->add_option("--tol", c.tol, "Max relative residual")->capture_default_str();
  oracle->add_option("--sharp-dims", c.sharp_dims, "Dimensions for the sharp-constant probe")->delimiter(',')->capture_default_str();
  oracle->add_option("--sharp-restarts", c.sharp_restarts)->capture_default_str();

  auto* radial = app.add_subcommand("radial", "Radial shooting scans");
  radial->add_option("--n", c.radial_n, "Single-case dimension (alpha defaults to 2)");
  radial->add_option("--alpha", c.radial_alpha, "Single-case exponent (n defaults to 6)");
  radial->add_option("--cases", c.cases, "n:alpha list used without --n/--alpha")->capture_default_str();
  radial->add_option("--grid", c.radial_grid, "u0 x v0 grid points")->capture_default_str();
  radial->add_option("--rmax", c.rmax)->capture_default_str();
  radial->add_flag("--dump-trajectories", c.dump_trajectories, "Write one CSV per cell");
  radial->add_option("--dump-dir", c.dump_dir)->capture_default_str();

  app.add_subcommand("all", "Every section with the options above (set them via --config)");

  if (const char* env = std::getenv("BHV_CONFIG"); env && *env && !std::filesystem::exists(env)) {
    err << "config file from BHV_CONFIG not found: " << env << "\n";
    return kExitUsage;
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  Json report;
  try {
    report = build_report(c);
  } catch (const UnknownName& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterRange& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string text = render_report(report, c.format);
  if (c.out.empty()) {
    out << text;
  } else {
    try {
      write_atomic(c.out, text);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  if (!report_passed(report)) {
    for (const auto& [name, sec] : report["sections"].items())
      for (const auto& f : sec["failures"]) err << name << ": " << f.get<std::string>() << "\n";
    return kExitMathFailure;
  }
  return kExitPass;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace bhv
