#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bhv/jetoracle.hpp"
#include "bhv/paramcheck.hpp"
#include "bhv/radial.hpp"
#include "bhv/registry.hpp"
#include "json.hpp"

namespace bhv {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "bhv-report/1";
inline constexpr const char* kEngineName = "bhv";
inline constexpr const char* kEngineVersion = "0.3.0";

/// A test-only coefficient shift applied to one right-hand-side term.
struct Mutation {
  std::string id;
  std::size_t term = 0;
  std::string delta;
};

struct VerifyOptions {
  std::vector<std::string> ids;
  std::optional<SubstitutionMode> mode;
  std::vector<Mutation> mutations;
};

struct ParamsOptions {
  int n_max = 100;
};

struct ScanPdOptions {
  int n_lo = 5, n_hi = 100;
  int grid = 1000;
};

struct OracleOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  std::vector<int> dims = {5, 6, 8};
  double tol = 1e-9;
  std::vector<int> sharp_dims = {5, 6, 7, 8};
  std::size_t sharp_restarts = 64;
};

struct RadialCase {
  int n = 6;
  double alpha = 2;
};

struct RadialOptions {
  std::vector<RadialCase> cases = {{5, 2}, {6, 2}, {6, 3}, {8, 2}};
  int u0_count = 10, v0_count = 10;
  double u0_lo = 0.1, u0_hi = 10, v0_lo = -10, v0_hi = 0;
  double rmax = 50;
  std::optional<std::string> dump_dir;
};

namespace detail {

inline Json section_shell() {
  Json s;
  s["ok"] = true;
  s["failures"] = Json::array();
  s["errata"] = Json::array();
  return s;
}

inline void fail(Json& s, std::string what) {
  s["ok"] = false;
  s["failures"].push_back(std::move(what));
}

inline Json erratum(std::string subject, std::string detail) { return Json{{"subject", std::move(subject)}, {"detail", std::move(detail)}}; }

inline Json formula_json(const FormulaCheck& c) {
  Json j{{"name", c.name}, {"ok", c.ok}, {"mandatory", c.mandatory}};
  if (!c.residual.empty()) j["residual"] = c.residual;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline void add_formulas(Json& s, const std::vector<FormulaCheck>& checks) {
  for (const auto& c : checks) {
    s["formulas"].push_back(formula_json(c));
    if (c.ok) continue;
    if (c.mandatory)
      fail(s, "formula: " + c.name);
    else
      s["errata"].push_back(erratum(c.name, c.note));
  }
}

inline Json certificate_json(const SignCertificate& c) {
  Json j{{"poly", c.poly},
         {"interval", {c.lo.get_str(), c.hi.get_str()}},
         {"verdict", c.verdict},
         {"roots", c.root_count},
         {"poles", c.pole_count},
         {"chain_length", c.chain.size()},
         {"endpoint_multiplicity", {c.lo_multiplicity, c.hi_multiplicity}}};
  j["endpoint_values"] = {c.lo_value ? Json(c.lo_value->get_str()) : Json(nullptr), c.hi_value ? Json(c.hi_value->get_str()) : Json(nullptr)};
  return j;
}

inline std::string fmt_double(double d) {
  std::ostringstream os;
  os.precision(6);
  os << d;
  return os.str();
}

}  // namespace detail

/// Symbolic verification of registered identities, combination recovery and
/// the derivation chain.
inline Json verify_section(const VerifyOptions& opt = {}) {
  Json s = detail::section_shell();
  std::vector<const Identity*> ids;
  if (opt.ids.empty())
    for (const auto& id : registry()) ids.push_back(&id);
  else
    for (const auto& name : opt.ids) ids.push_back(&find_identity(name));

  s["identities"] = Json::array();
  int verified = 0;
  for (const Identity* base : ids) {
    Identity id = *base;
    for (const auto& m : opt.mutations)
      if (m.id == base->id) id = mutate(id, m.term, P(m.delta));
    const auto rep = verify_identity(id, opt.mode);
    Json j{{"id", rep.id}, {"anchor", rep.anchor}, {"mode", mode_name(rep.mode)}, {"status", rep.status}, {"residual_terms", rep.residual_terms}};
    if (!rep.error.empty()) j["error"] = rep.error;
    if (!rep.note.empty()) j["note"] = rep.note;
    if (rep.printed_residual) {
      j["printed_residual"] = *rep.printed_residual;
      if (!rep.printed_residual->empty())
        s["errata"].push_back(detail::erratum(rep.id + " printed right-hand side", rep.note.empty() ? "printed form leaves a residual" : rep.note));
    }
    if (rep.ok())
      ++verified;
    else
      detail::fail(s, rep.id + ": " + rep.status);
    s["identities"].push_back(std::move(j));
  }
  s["verified"] = verified;
  s["total"] = ids.size();

  if (opt.ids.empty()) {
    const auto rec = recover_master_weights();
    Json c{{"ok", rec.matches()}, {"weights", Json::array()}};
    if (!rec.error.empty()) c["error"] = rec.error;
    for (std::size_t i = 0; i < rec.expected.size(); ++i) {
      Json w{{"name", rec.names[i]}, {"expected", rec.expected[i].str()}};
      if (i < rec.weights.size()) {
        w["value"] = rec.weights[i].str();
        w["match"] = rec.weights[i] == rec.expected[i];
      }
      c["weights"].push_back(std::move(w));
    }
    if (!rec.matches()) detail::fail(s, "master combination weights");
    s["combination"] = std::move(c);

    s["derivation"] = Json::array();
    for (const auto& st : derivation_steps()) {
      const bool ok = (st.lhs - st.rhs).is_zero();
      s["derivation"].push_back({{"id", st.id}, {"anchor", st.anchor}, {"ok", ok}});
      if (!ok) detail::fail(s, "derivation step " + st.id);
    }
  }
  return s;
}

/// Exact-rational grid for the exponent arithmetic: n = 5..24, alpha_j = 1 + j((n+4)/(n-4) - 1)/21.
inline std::vector<Rational> exponent_alpha_grid(int n, int points = 20) {
  std::vector<Rational> g;
  const Rational span = critical_alpha(n) - 1;
  for (int j = 1; j <= points; ++j) {
    Rational a = 1 + span * j / (points + 1);
    a.canonicalize();
    g.push_back(a);
  }
  return g;
}

/// a_j = 2j/((n-4)(points+1)), strictly inside (0, 2/(n-4)).
inline std::vector<Rational> est_a_grid(int n, int points = 20) {
  std::vector<Rational> g;
  for (int j = 1; j <= points; ++j) g.push_back(ratio(2 * j, (n - 4) * (points + 1)));
  return g;
}

/// Formula checks, sign certificates for n = 5..n_max and the exponent arithmetic.
inline Json params_section(const ParamsOptions& opt = {}) {
  if (opt.n_max < 5) throw ParameterRange("n-max must be >= 5");
  Json s = detail::section_shell();
  s["n_max"] = opt.n_max;
  s["formulas"] = Json::array();
  const MatrixA a = build_matrix_A();
  s["formulas"].push_back({{"name", "A11 from c1, c2 equals the expanded quadratic"}, {"ok", a.a11_routes_agree}, {"mandatory", true}});
  if (!a.a11_routes_agree) detail::fail(s, "A11 routes disagree");
  detail::add_formulas(s, check_minor_formulas());
  detail::add_formulas(s, check_exponent_formulas());

  s["certificates"] = Json::array();
  int certified = 0;
  for (int n = 5; n <= opt.n_max; ++n) {
    const auto f1 = positivity_certificate(PolyId::F1, n);
    const auto f3 = positivity_certificate(PolyId::F3, n);
    const auto syl = sylvester_certificate(n);
    const bool ok = f1.positive() && f3.positive() && syl.positive_definite();
    s["certificates"].push_back({{"n", n},
                                 {"ok", ok},
                                 {"f1", detail::certificate_json(f1)},
                                 {"f3", detail::certificate_json(f3)},
                                 {"a11", detail::certificate_json(syl.a11)},
                                 {"minor2", detail::certificate_json(syl.minor2)},
                                 {"det", detail::certificate_json(syl.det)}});
    if (ok)
      ++certified;
    else
      detail::fail(s, "certificate n=" + std::to_string(n));
  }
  s["certified"] = certified;

  Json ex{{"grid", "n = 5..24, 20 alpha points in (1, (n+4)/(n-4))"}, {"points", 0}, {"gamma_ok", 0}, {"exponent_negative", 0}, {"chain_holds", 0}};
  Json reductions = Json::array();
  int points = 0, gamma_ok = 0, negative = 0, chain = 0;
  for (int n = 5; n <= 24; ++n) {
    int chain_n = 0;
    for (const auto& alpha : exponent_alpha_grid(n)) {
      const auto c = exponent_check(n, alpha);
      ++points;
      gamma_ok += c.gamma_ok;
      negative += c.exponent_negative;
      chain += c.chain_holds();
      chain_n += c.chain_holds();
      if (!c.gamma_ok) detail::fail(s, "gamma < 6 at n=" + std::to_string(n) + " alpha=" + alpha.get_str());
      if (!c.exponent_negative) detail::fail(s, "exponent >= 0 at n=" + std::to_string(n) + " alpha=" + alpha.get_str());
    }
    const auto r = exponent_linear_reduction(n);
    reductions.push_back({{"n", n},
                          {"slope", r.slope.get_str()},
                          {"value_at_1", r.value_at_1.get_str()},
                          {"value_at_end", r.value_at_end.get_str()},
                          {"negative_on_range", r.negative_on_range},
                          {"chain_points", chain_n}});
    if (chain_n < 20)
      s["errata"].push_back(detail::erratum(
          "exponent chain at n=" + std::to_string(n),
          "exponent < -8/((n-4)(alpha-1)) fails at " + std::to_string(20 - chain_n) +
              " of 20 grid points; the reduction (n^2-2n-16)(alpha-(n+4)/(n-4)) < 0 needs n^2-2n-16 > 0. The exponent itself stays negative."));
  }
  ex["points"] = points;
  ex["gamma_ok"] = gamma_ok;
  ex["exponent_negative"] = negative;
  ex["chain_holds"] = chain;
  ex["reductions"] = std::move(reductions);
  s["exponent"] = std::move(ex);

  int est_points = 0, est_positive = 0;
  for (int n = 5; n <= 24; ++n)
    for (const auto& av : est_a_grid(n)) {
      ++est_points;
      if (est_coefficient(n, av) > 0)
        ++est_positive;
      else
        detail::fail(s, "a(1+2a)(2-(n-4)a) <= 0 at n=" + std::to_string(n) + " a=" + av.get_str());
    }
  s["est_coefficient"] = {{"points", est_points}, {"positive", est_positive}};
  return s;
}

/// Numeric lambda_min scan of A against the exact Sylvester verdict.
inline Json scan_pd_section(const ScanPdOptions& opt = {}) {
  if (opt.n_lo < 5 || opt.n_hi < opt.n_lo) throw ParameterRange("n range must satisfy 5 <= lo <= hi");
  if (opt.grid < 1) throw ParameterRange("grid must be positive");
  Json s = detail::section_shell();
  s["n_range"] = {opt.n_lo, opt.n_hi};
  s["grid"] = opt.grid;
  s["scans"] = Json::array();
  std::size_t points = 0, agreements = 0;
  for (int n = opt.n_lo; n <= opt.n_hi; ++n) {
    try {
      const auto r = numeric_pd_scan(n, opt.grid);
      points += r.points;
      agreements += r.agreements;
      s["scans"].push_back({{"n", n},
                            {"points", r.points},
                            {"agreements", r.agreements},
                            {"min_lambda", r.min_lambda},
                            {"argmin_alpha", r.argmin_alpha},
                            {"lambda_near_end", r.lambda_near_end}});
      if (!r.all_positive()) detail::fail(s, "lambda_min <= 0 at n=" + std::to_string(n));
    } catch (const EngineInconsistency& e) {
      s["scans"].push_back({{"n", n}, {"error", e.what()}});
      detail::fail(s, e.what());
    }
  }
  s["points"] = points;
  s["agreements"] = agreements;
  return s;
}

/// Random-jet checks of every identity plus the trace-free sharp-constant probe.
inline Json oracle_section(const OracleOptions& opt = {}) {
  if (opt.samples == 0) throw ParameterRange("samples must be positive");
  if (!(opt.tol > 0)) throw ParameterRange("tol must be positive");
  for (int n : opt.dims)
    if (n < 5) throw ParameterRange("oracle dims must be >= 5");
  for (int n : opt.sharp_dims)
    if (n < 2) throw ParameterRange("sharp-constant dims must be >= 2");
  Json s = detail::section_shell();
  s["seed"] = opt.seed;
  s["samples"] = opt.samples;
  s["tol"] = opt.tol;
  s["dims"] = opt.dims;
  s["checks"] = Json::array();
  double worst = 0;
  for (const auto& id : registry())
    for (int n : opt.dims) {
      const auto r = numeric_check_identity(id, n, opt.samples, opt.tol, opt.seed);
      Json j{{"id", r.id}, {"n", n}, {"samples", r.samples}, {"max_residual", r.max_residual}, {"passed", r.passed()}};
      if (!r.error.empty()) j["error"] = r.error;
      if (!r.passed()) {
        j["worst_seed"] = r.worst_seed;
        j["worst_params"] = {{"alpha", r.worst_params.alpha}, {"a", r.worst_params.a}, {"b", r.worst_params.b_at(n)}};
        if (r.failing_jet) j["failing_jet"] = *r.failing_jet;
        detail::fail(s, r.id + " at n=" + std::to_string(n) + ": residual " + detail::fmt_double(r.max_residual));
      }
      worst = std::max(worst, r.max_residual);
      s["checks"].push_back(std::move(j));
    }
  s["max_residual"] = worst;

  s["sharp_constant"] = Json::array();
  for (int n : opt.sharp_dims) {
    const auto r = sharp_constant_search(n, opt.sharp_restarts, opt.seed);
    const bool match = std::abs(r.minimum - r.candidate) <= 1e-6;
    s["sharp_constant"].push_back({{"n", n},
                                   {"minimum", r.minimum},
                                   {"n_over_n_minus_1", r.candidate},
                                   {"cited", r.cited},
                                   {"matches_n_over_n_minus_1", match},
                                   {"below_cited", r.below_cited},
                                   {"extremizer", r.extremizer()},
                                   {"restarts", r.restarts},
                                   {"skipped", r.skipped}});
    if (!match) detail::fail(s, "sharp constant at n=" + std::to_string(n) + " is " + detail::fmt_double(r.minimum));
    if (r.below_cited)
      s["errata"].push_back(detail::erratum("trace-free constant at n=" + std::to_string(n),
                                            "measured minimum " + detail::fmt_double(r.minimum) + " is below the cited 4/3"));
  }
  return s;
}

inline std::string trajectory_file_name(const ShootingResult& r, int iu, int iv) {
  std::ostringstream os;
  os << "traj_n" << r.n << "_a" << r.alpha << "_u" << iu << "_v" << iv << ".csv";
  return os.str();
}

/// Shooting scans over (u0, v0) grids; optional per-cell CSV dumps.
inline Json radial_section(const RadialOptions& opt = {}, bool timings = false) {
  if (opt.u0_count < 0 || opt.v0_count < 0) throw ParameterRange("grid sizes must be non-negative");
  if (!(opt.u0_lo > 0) || opt.u0_hi < opt.u0_lo) throw ParameterRange("u0 range must satisfy 0 < lo <= hi");
  if (opt.v0_hi > 0 || opt.v0_hi < opt.v0_lo) throw ParameterRange("v0 range must satisfy lo <= hi <= 0");
  if (!(opt.rmax > 0)) throw ParameterRange("rmax must be positive");
  for (const auto& c : opt.cases)
    if (c.n < 5 || !(c.alpha > 1)) throw ParameterRange("radial cases need n >= 5 and alpha > 1");

  Json s = detail::section_shell();
  s["rmax"] = opt.rmax;
  s["grid"] = {{"u0", {opt.u0_lo, opt.u0_hi, opt.u0_count, "log"}}, {"v0", {opt.v0_lo, opt.v0_hi, opt.v0_count, "linear"}}};
  s["scans"] = Json::array();
  const auto u0s = log_grid(opt.u0_lo, opt.u0_hi, opt.u0_count);
  const auto v0s = linear_grid(opt.v0_lo, opt.v0_hi, opt.v0_count);
  ShootingOptions so;
  so.rmax = opt.rmax;
  for (const auto& c : opt.cases) {
    const auto sum = scan_shooting(c.n, c.alpha, u0s, v0s, so);
    Json j{{"n", c.n}, {"alpha", c.alpha}, {"survivors", sum.survivors}, {"errors", sum.errors}, {"survival_fraction", sum.survival_fraction()}};
    if (timings) j["seconds"] = sum.seconds;
    Json cells = Json::array();
    std::size_t positive_z = 0, boundary = 0;
    for (const auto& cell : sum.cells) {
      Json cj{{"u0", cell.u0}, {"v0", cell.v0}, {"r_end", cell.r_end}, {"near_boundary", cell.near_boundary}};
      cj["verdict"] = cell.verdict ? Json(verdict_name(*cell.verdict)) : Json(nullptr);
      cj["max_z"] = cell.max_z ? Json(*cell.max_z) : Json(nullptr);
      if (!cell.error.empty()) cj["error"] = cell.error;
      if (cell.max_z && *cell.max_z > 0) ++positive_z;
      boundary += cell.near_boundary;
      cells.push_back(std::move(cj));
    }
    j["positive_z_cells"] = positive_z;
    j["boundary_cells"] = boundary;
    j["cells"] = std::move(cells);
    if (sum.survivors > 0) detail::fail(s, std::to_string(sum.survivors) + " survivors at n=" + std::to_string(c.n) + " alpha=" + detail::fmt_double(c.alpha));
    if (sum.errors > 0) detail::fail(s, std::to_string(sum.errors) + " cell errors at n=" + std::to_string(c.n) + " alpha=" + detail::fmt_double(c.alpha));

    if (opt.dump_dir) {
      std::filesystem::create_directories(*opt.dump_dir);
      Json files = Json::array();
      for (std::size_t iu = 0; iu < u0s.size(); ++iu)
        for (std::size_t iv = 0; iv < v0s.size(); ++iv) {
          const auto r = shoot(c.n, c.alpha, u0s[iu], v0s[iv], so);
          const auto path = std::filesystem::path(*opt.dump_dir) / trajectory_file_name(r, static_cast<int>(iu), static_cast<int>(iv));
          std::ofstream(path) << trajectory_csv(r);
          files.push_back(path.filename().string());
        }
      j["trajectory_files"] = std::move(files);
    }
    s["scans"].push_back(std::move(j));
  }
  return s;
}

/// Assembles the report document; status is "pass" iff every section is ok.
inline Json make_report(const Json& config, Json sections) {
  Json r;
  r["schema"] = kReportSchema;
  r["engine"] = {{"name", kEngineName}, {"version", kEngineVersion}};
  r["config"] = config;
  bool ok = true;
  Json errata = Json::array();
  if (sections.is_null()) sections = Json::object();
  for (auto& [name, sec] : sections.items()) {
    ok = ok && sec.value("ok", true);
    for (const auto& e : sec.value("errata", Json::array())) errata.push_back({{"section", name}, {"subject", e["subject"]}, {"detail", e["detail"]}});
  }
  r["sections"] = std::move(sections);
  r["errata"] = std::move(errata);
  r["notes"] = homogeneity_notes();
  r["status"] = ok ? "pass" : "fail";
  return r;
}

inline bool report_passed(const Json& r) { return r.at("status") == "pass"; }

namespace detail {

inline std::string md_escape(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

inline std::string md_value(const Json& v) {
  if (v.is_string()) return md_escape(v.get<std::string>());
  if (v.is_null()) return "-";
  return md_escape(v.dump());
}

inline void md_failures(std::ostream& os, const Json& sec) {
  os << "Status: " << (sec.value("ok", true) ? "ok" : "FAILED") << "\n\n";
  for (const auto& f : sec.value("failures", Json::array())) os << "- failure: " << md_value(f) << "\n";
  if (!sec.value("failures", Json::array()).empty()) os << "\n";
}

inline void md_verify(std::ostream& os, const Json& sec) {
  os << "Verified " << sec.value("verified", 0) << "/" << sec.value("total", 0) << " identities.\n\n";
  for (const auto& id : sec.value("identities", Json::array())) {
    const std::string name = id.value("id", "");
    os << "<a id=\"" << name << "\"></a>\n### " << name << ": " << md_escape(id.value("anchor", "")) << "\n\n";
    os << "- mode: " << id.value("mode", "") << "\n- status: " << id.value("status", "") << "\n";
    for (const auto& t : id.value("residual_terms", Json::array())) os << "- residual: `" << md_value(t) << "`\n";
    if (id.contains("printed_residual") && !id["printed_residual"].empty())
      os << "- printed form leaves " << id["printed_residual"].size() << " residual term(s)\n";
    if (id.contains("note")) os << "- note: " << md_value(id["note"]) << "\n";
    if (id.contains("error")) os << "- error: " << md_value(id["error"]) << "\n";
    os << "\n";
  }
  if (sec.contains("combination")) {
    os << "### Master combination\n\n| weight | value | match |\n|---|---|---|\n";
    for (const auto& w : sec["combination"]["weights"])
      os << "| " << md_value(w["name"]) << " | `" << md_value(w.value("value", Json(nullptr))) << "` | " << md_value(w.value("match", Json(nullptr))) << " |\n";
    os << "\n";
  }
}

inline void md_params(std::ostream& os, const Json& sec) {
  os << "| formula | ok | mandatory |\n|---|---|---|\n";
  for (const auto& f : sec.value("formulas", Json::array()))
    os << "| " << md_value(f["name"]) << " | " << md_value(f["ok"]) << " | " << md_value(f["mandatory"]) << " |\n";
  os << "\nCertified n = 5.." << sec.value("n_max", 0) << ": " << sec.value("certified", 0) << " of " << sec.value("certificates", Json::array()).size() << "\n\n";
  if (sec.contains("exponent")) {
    const auto& e = sec["exponent"];
    os << "Exponent grid: " << e.value("points", 0) << " points, gamma >= 6 at " << e.value("gamma_ok", 0) << ", exponent < 0 at "
       << e.value("exponent_negative", 0) << ", full chain at " << e.value("chain_holds", 0) << "\n\n";
  }
}

inline void md_scan_pd(std::ostream& os, const Json& sec) {
  os << "Points: " << sec.value("points", 0) << ", sign agreements: " << sec.value("agreements", 0) << "\n\n";
  os << "| n | min lambda | at alpha |\n|---|---|---|\n";
  for (const auto& r : sec.value("scans", Json::array()))
    os << "| " << r.value("n", 0) << " | " << md_value(r.value("min_lambda", Json(nullptr))) << " | " << md_value(r.value("argmin_alpha", Json(nullptr))) << " |\n";
  os << "\n";
}

inline void md_oracle(std::ostream& os, const Json& sec) {
  os << "Max relative residual: " << md_value(sec.value("max_residual", Json(nullptr))) << " (tol " << md_value(sec.value("tol", Json(nullptr))) << ")\n\n";
  os << "| identity | n | max residual | passed |\n|---|---|---|---|\n";
  for (const auto& c : sec.value("checks", Json::array()))
    os << "| [" << c.value("id", "") << "](#" << c.value("id", "") << ") | " << c.value("n", 0) << " | " << md_value(c["max_residual"]) << " | "
       << md_value(c["passed"]) << " |\n";
  os << "\n| n | minimum | n/(n-1) | below 4/3 |\n|---|---|---|---|\n";
  for (const auto& c : sec.value("sharp_constant", Json::array()))
    os << "| " << c.value("n", 0) << " | " << md_value(c["minimum"]) << " | " << md_value(c["n_over_n_minus_1"]) << " | " << md_value(c["below_cited"]) << " |\n";
  os << "\n";
}

inline void md_radial(std::ostream& os, const Json& sec) {
  os << "| n | alpha | cells | survivors | errors | positive Z cells |\n|---|---|---|---|---|---|\n";
  for (const auto& r : sec.value("scans", Json::array()))
    os << "| " << r.value("n", 0) << " | " << md_value(r["alpha"]) << " | " << r.value("cells", Json::array()).size() << " | " << md_value(r["survivors"])
       << " | " << md_value(r["errors"]) << " | " << md_value(r["positive_z_cells"]) << " |\n";
  os << "\n";
}

}  // namespace detail

inline std::string render_json(const Json& r) { return r.dump(2) + "\n"; }

inline std::string render_markdown(const Json& r) {
  std::ostringstream os;
  os << "# Verification report\n\n";
  os << "- schema: " << r.value("schema", "") << "\n";
  if (r.contains("engine")) os << "- engine: " << r["engine"].value("name", "") << " " << r["engine"].value("version", "") << "\n";
  os << "- status: **" << r.value("status", "") << "**\n\n";
  const Json sections = r.value("sections", Json::object());
  for (const auto& [name, sec] : sections.items()) {
    os << "## " << name << "\n\n";
    detail::md_failures(os, sec);
    if (name == "verify") detail::md_verify(os, sec);
    else if (name == "params") detail::md_params(os, sec);
    else if (name == "scan_pd") detail::md_scan_pd(os, sec);
    else if (name == "oracle") detail::md_oracle(os, sec);
    else if (name == "radial") detail::md_radial(os, sec);
  }
  const auto errata = r.value("errata", Json::array());
  if (!errata.empty()) {
    os << "## Errata and findings\n\n";
    for (const auto& e : errata) os << "- [" << detail::md_value(e["section"]) << "] " << detail::md_value(e["subject"]) << ": " << detail::md_value(e["detail"]) << "\n";
    os << "\n";
  }
  const auto notes = r.value("notes", Json::array());
  if (!notes.empty()) {
    os << "## Notes\n\n";
    for (const auto& n : notes) os << "- " << detail::md_value(n) << "\n";
    os << "\n";
  }
  return os.str();
}

/// Renders as "json" or "markdown"; anything else is a ParameterRange error.
inline std::string render_report(const Json& r, const std::string& format) {
  if (format == "json") return render_json(r);
  if (format == "markdown") return render_markdown(r);
  throw ParameterRange("unsupported format '" + format + "'");
}

/// Writes through a temporary file in the same directory, then renames.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ParameterRange("cannot open " + tmp.string() + " for writing");
    os << text;
    if (!os.flush()) throw ParameterRange("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bhv
