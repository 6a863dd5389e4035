#ifndef FRACSOLVE_CLI_HPP
#define FRACSOLVE_CLI_HPP

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracsolve/charpoly.hpp"
#include "fracsolve/errors.hpp"
#include "fracsolve/pde.hpp"
#include "fracsolve/solutions.hpp"
#include "fracsolve/verify.hpp"

namespace fracsolve::cli {

using nlohmann::json;
using cplx = std::complex<double>;

enum ExitCode : int { kOk = 0, kMalformed = 1, kUnsupported = 2, kVerifyFailed = 3, kConvergence = 4 };

enum class Kind { ScalarFode, SystemFode, ScalarPde, SystemPde };

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::ScalarFode: return "scalar_fode";
    case Kind::SystemFode: return "system_fode";
    case Kind::ScalarPde: return "scalar_pde";
    case Kind::SystemPde: return "system_pde";
  }
  return "?";
}

inline bool is_pde(Kind k) { return k == Kind::ScalarPde || k == Kind::SystemPde; }
inline bool is_system(Kind k) { return k == Kind::SystemFode || k == Kind::SystemPde; }

struct Problem {
  Kind kind = Kind::ScalarFode;
  std::variant<charpoly::FodeSpec, charpoly::SystemSpec, pde::EvolutionPde, pde::SystemPde> spec;
  std::optional<solutions::Branch> branch;
  std::vector<cplx> constants;
  std::optional<double> tolerance;
  std::vector<double> points;
  std::vector<double> grid_x, grid_t;
  json source; // the problem document as read
};

/// A constructed solution: scalar or pair, lifted through a reduction for PDE kinds.
struct Solved {
  std::optional<solutions::SolutionExpression> scalar;
  std::optional<solutions::SystemSolution> system;
  std::optional<pde::PdeReduction> reduction;
};

namespace detail {

using solutions::detail::field;
using solutions::detail::number;
using solutions::detail::only_keys;

inline std::vector<double> number_list(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw DomainError(std::string("field '") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw DomainError(std::string("field '") + key + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline Kind kind_from_string(const std::string& s) {
  for (Kind k : {Kind::ScalarFode, Kind::SystemFode, Kind::ScalarPde, Kind::SystemPde})
    if (s == to_string(k)) return k;
  throw DomainError("unknown problem kind '" + s + "'");
}

inline void parse_common(const json& j, Problem& p) {
  if (j.contains("branch")) {
    if (!j.at("branch").is_string()) throw DomainError("branch must be a string");
    p.branch = solutions::branch_from_string(j.at("branch").get<std::string>());
  }
  if (j.contains("constants")) {
    if (!j.at("constants").is_array()) throw DomainError("constants must be an array");
    for (const auto& c : j.at("constants")) p.constants.push_back(solutions::detail::complex_from_json(c));
  }
  if (j.contains("tolerance")) {
    p.tolerance = number(j, "tolerance");
    if (!(*p.tolerance > 0.0)) throw DomainError("tolerance must be positive");
  }
}

} // namespace detail

inline Problem parse_problem(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw DomainError("problem file must hold a JSON object");
  const json& kind = field(j, "kind");
  if (!kind.is_string()) throw DomainError("kind must be a string");
  Problem p;
  p.kind = kind_from_string(kind.get<std::string>());
  p.source = j;
  switch (p.kind) {
    case Kind::ScalarFode: {
      only_keys(j, {"kind", "description", "alpha", "coeffs", "branch", "constants", "tolerance", "points"});
      charpoly::FodeSpec s{number(j, "alpha"), number_list(j, "coeffs")};
      s.validate();
      p.spec = s;
      break;
    }
    case Kind::SystemFode: {
      only_keys(j, {"kind", "description", "alpha", "a_coeffs", "b_coeffs", "branch", "constants", "tolerance",
                    "points"});
      charpoly::SystemSpec s{number(j, "alpha"), number_list(j, "a_coeffs"), number_list(j, "b_coeffs")};
      s.validate();
      p.spec = s;
      break;
    }
    case Kind::ScalarPde: {
      only_keys(j, {"kind", "description", "alpha", "coeffs", "b", "p", "a", "branch", "constants", "tolerance",
                    "grid"});
      pde::EvolutionPde e{number(j, "alpha"), number_list(j, "coeffs"), number(j, "b"), number(j, "p"),
                          number(j, "a")};
      e.validate();
      p.spec = e;
      break;
    }
    case Kind::SystemPde: {
      only_keys(j, {"kind", "description", "alpha", "a1", "a2", "b1", "b2", "m1", "m2", "c", "d", "branch",
                    "constants", "tolerance", "grid"});
      pde::SystemPde e{number(j, "alpha"), number(j, "a1"), number(j, "a2"), number(j, "b1"), number(j, "b2"),
                       number(j, "m1"),    number(j, "m2"), number(j, "c"),  number(j, "d")};
      e.validate();
      p.spec = e;
      break;
    }
  }
  if (j.contains("description") && !j.at("description").is_string())
    throw DomainError("description must be a string");
  parse_common(j, p);
  if (is_pde(p.kind)) {
    p.grid_x = pde::kDefaultX;
    p.grid_t = pde::kDefaultT;
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      only_keys(g, {"x", "t"});
      p.grid_x = number_list(g, "x");
      p.grid_t = number_list(g, "t");
    }
  } else {
    p.points = j.contains("points") ? number_list(j, "points") : verify::kDefaultPoints;
  }
  return p;
}

inline Solved solve(const Problem& p) {
  solutions::SolveOptions opt;
  opt.branch = p.branch;
  Solved s;
  switch (p.kind) {
    case Kind::ScalarFode: s.scalar = solutions::solve_scalar(std::get<charpoly::FodeSpec>(p.spec), opt); break;
    case Kind::SystemFode: s.system = solutions::solve_system(std::get<charpoly::SystemSpec>(p.spec), opt); break;
    case Kind::ScalarPde:
      s.reduction = pde::reduce_scalar(std::get<pde::EvolutionPde>(p.spec));
      s.scalar = solutions::solve_scalar(s.reduction->scalar(), opt);
      break;
    case Kind::SystemPde:
      s.reduction = pde::reduce_system(std::get<pde::SystemPde>(p.spec));
      s.system = solutions::solve_system(s.reduction->system(), opt);
      break;
  }
  return s;
}

/// Document written by `solve`; `eval` and `verify` accept it in place of the problem.
inline json solution_document(const Problem& p, const Solved& s) {
  json j{{"kind", "solution"}, {"problem", p.source}};
  j["solution"] = s.scalar ? solutions::to_json(*s.scalar) : solutions::to_json(*s.system);
  if (s.reduction) j["reduction"] = pde::to_json(*s.reduction);
  return j;
}

/// Problem plus solution from either a problem file or a saved solution document.
inline std::pair<Problem, Solved> load(const json& j) {
  if (j.is_object() && j.contains("kind") && j.at("kind") == "solution") {
    detail::only_keys(j, {"kind", "problem", "solution", "reduction"});
    Problem p = parse_problem(detail::field(j, "problem"));
    Solved s;
    if (p.kind == Kind::ScalarPde) s.reduction = pde::reduce_scalar(std::get<pde::EvolutionPde>(p.spec));
    if (p.kind == Kind::SystemPde) s.reduction = pde::reduce_system(std::get<pde::SystemPde>(p.spec));
    if (is_system(p.kind)) {
      s.system = solutions::system_from_json(detail::field(j, "solution"));
    } else {
      s.scalar = solutions::expression_from_json(detail::field(j, "solution"));
    }
    return {std::move(p), std::move(s)};
  }
  Problem p = parse_problem(j);
  Solved s = solve(p);
  return {std::move(p), std::move(s)};
}

namespace detail {

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw DomainError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw DomainError("not a number: '" + s + "'");
  return v;
}

/// Comma-separated values; an item a:b:n expands to n evenly spaced values.
inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw DomainError("empty entry in list '" + s + "'");
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_double(item));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw DomainError("range must be start:stop:count, got '" + item + "'");
    const double a = parse_double(item.substr(0, c1)), b = parse_double(item.substr(c1 + 1, c2 - c1 - 1));
    const double nd = parse_double(item.substr(c2 + 1));
    const int n = static_cast<int>(nd);
    if (n < 1 || n != nd) throw DomainError("range count must be a positive integer, got '" + item + "'");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

/// "XLIST;TLIST".
inline std::pair<std::vector<double>, std::vector<double>> parse_grid(const std::string& s) {
  const auto semi = s.find(';');
  if (semi == std::string::npos) throw DomainError("grid must be XLIST;TLIST, got '" + s + "'");
  return {parse_list(s.substr(0, semi)), parse_list(s.substr(semi + 1))};
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline double env_tolerance() {
  const char* v = std::getenv("FRACSOLVE_TOL");
  if (!v || !*v) return 0.0;
  const double t = parse_double(v);
  if (!(t > 0.0)) throw DomainError("FRACSOLVE_TOL must be positive");
  return t;
}

inline constexpr double kEvalTolerance = 1e-14;

} // namespace detail

/// CSV rows: `z,value` (`z,phi,psi` for systems) or `x,t,u[,v]`.
inline std::string evaluate_csv(const Problem& p, const Solved& s, const std::vector<double>& zs,
                                const std::vector<double>& xs, const std::vector<double>& ts) {
  using detail::fmt;
  std::ostringstream os;
  const std::vector<cplx> c = p.constants;
  if (!is_pde(p.kind)) {
    if (s.scalar) {
      solutions::ExpressionEvaluator ev(*s.scalar);
      os << "z,value\n";
      for (double z : zs) {
        if (!(z > 0.0)) throw DomainError("evaluation points must be positive");
        os << fmt(z) << ',' << fmt(ev(c, z, detail::kEvalTolerance).real()) << '\n';
      }
    } else {
      solutions::ExpressionEvaluator phi(s.system->phi), psi(s.system->psi);
      os << "z,phi,psi\n";
      for (double z : zs) {
        if (!(z > 0.0)) throw DomainError("evaluation points must be positive");
        os << fmt(z) << ',' << fmt(phi(c, z, detail::kEvalTolerance).real()) << ','
           << fmt(psi(c, z, detail::kEvalTolerance).real()) << '\n';
      }
    }
    return os.str();
  }
  std::optional<pde::InvariantSolution> sol;
  if (s.scalar) sol.emplace(*s.reduction, *s.scalar);
  else sol.emplace(*s.reduction, *s.system);
  os << (s.system ? "x,t,u,v\n" : "x,t,u\n");
  for (double x : xs) {
    for (double t : ts) {
      os << fmt(x) << ',' << fmt(t) << ',' << fmt((*sol)(c, x, t, detail::kEvalTolerance, 0).real());
      if (s.system) os << ',' << fmt((*sol)(c, x, t, detail::kEvalTolerance, 1).real());
      os << '\n';
    }
  }
  return os.str();
}

/// Verification document and its pass flag.
inline std::pair<json, bool> verify_problem(const Problem& p, const Solved& s, double tol) {
  json j{{"kind", "verification"}, {"problem_kind", to_string(p.kind)}, {"tolerance", tol}};
  bool pass = true;
  switch (p.kind) {
    case Kind::ScalarFode: {
      const auto r = verify::residual_scalar(std::get<charpoly::FodeSpec>(p.spec), *s.scalar, p.constants, p.points,
                                             tol);
      j["reports"] = {{"phi", verify::to_json(r)}};
      pass = r.pass;
      j["max_rel"] = r.max_rel;
      break;
    }
    case Kind::SystemFode: {
      const auto [r1, r2] = verify::residual_system(std::get<charpoly::SystemSpec>(p.spec), *s.system, p.constants,
                                                    p.points, tol);
      j["reports"] = {{"phi", verify::to_json(r1)}, {"psi", verify::to_json(r2)}};
      pass = r1.pass && r2.pass;
      j["max_rel"] = std::max(r1.max_rel, r2.max_rel);
      break;
    }
    case Kind::ScalarPde: {
      pde::InvariantSolution sol(*s.reduction, *s.scalar);
      const auto r = pde::residual_scalar(std::get<pde::EvolutionPde>(p.spec), sol, p.constants, p.grid_x, p.grid_t,
                                          tol);
      j["reports"] = {{"u", pde::to_json(r)}};
      pass = r.pass;
      j["max_rel"] = r.max_rel;
      break;
    }
    case Kind::SystemPde: {
      pde::InvariantSolution sol(*s.reduction, *s.system);
      const auto r = pde::residual_system(std::get<pde::SystemPde>(p.spec), sol, p.constants, p.grid_x, p.grid_t,
                                          tol);
      j["reports"] = {{"uv", pde::to_json(r)}};
      pass = r.pass;
      j["max_rel"] = r.max_rel;
      break;
    }
  }
  j["pass"] = pass;
  return {j, pass};
}

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write '" + path + "'");
  f << text;
  if (!f) throw DomainError("failed writing '" + path + "'");
}

} // namespace detail

/// Entry point; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact solutions of linear fractional differential equations", "fracsolve"};
  app.require_subcommand(1);

  std::string file, json_out, z_list, grid_spec, csv_out;
  std::optional<double> tol_flag;

  auto* solve_cmd = app.add_subcommand("solve", "Construct the solution family and print it as JSON");
  solve_cmd->add_option("file", file, "problem file")->required();
  solve_cmd->add_option("--json-out", json_out, "also write the solution document to PATH");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate the solution and print CSV");
  eval_cmd->add_option("file", file, "problem or solution file")->required();
  auto* z_opt = eval_cmd->add_option("--z", z_list, "comma-separated z values (ODE kinds)");
  auto* g_opt = eval_cmd->add_option("--grid", grid_spec, "XLIST;TLIST (PDE kinds); a:b:n expands to a range");
  z_opt->excludes(g_opt);
  eval_cmd->add_option("--csv-out", csv_out, "write CSV to PATH instead of standard output");

  auto* verify_cmd = app.add_subcommand("verify", "Check the residual of the constructed solution");
  verify_cmd->add_option("file", file, "problem or solution file")->required();
  verify_cmd->add_option("--tol", tol_flag, "relative residual tolerance");

  auto* reduce_cmd = app.add_subcommand("reduce", "Print the reduction of a PDE problem");
  reduce_cmd->add_option("file", file, "PDE problem file")->required();

  std::vector<const char*> argv{"fracsolve"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kMalformed;
  }

  try {
    if (*reduce_cmd) {
      const Problem p = parse_problem(detail::read_json_file(file));
      if (!is_pde(p.kind)) throw DomainError("reduce applies to scalar_pde and system_pde problems only");
      const pde::PdeReduction red = p.kind == Kind::ScalarPde
                                        ? pde::reduce_scalar(std::get<pde::EvolutionPde>(p.spec))
                                        : pde::reduce_system(std::get<pde::SystemPde>(p.spec));
      json j = pde::to_json(red);
      j["kind"] = "reduction";
      j["problem_kind"] = to_string(p.kind);
      out << j.dump(2) << '\n';
      return kOk;
    }

    const auto [p, s] = load(detail::read_json_file(file));

    if (*solve_cmd) {
      const json doc = solution_document(p, s);
      if (!json_out.empty()) detail::write_text(json_out, doc.dump(2) + "\n");
      out << doc.dump(2) << '\n';
      return kOk;
    }

    if (*eval_cmd) {
      std::vector<double> zs = p.points, xs = p.grid_x, ts = p.grid_t;
      if (!z_list.empty()) {
        if (is_pde(p.kind)) throw DomainError("--z applies to ODE problems; use --grid for PDE problems");
        zs = detail::parse_list(z_list);
      }
      if (!grid_spec.empty()) {
        if (!is_pde(p.kind)) throw DomainError("--grid applies to PDE problems; use --z for ODE problems");
        std::tie(xs, ts) = detail::parse_grid(grid_spec);
      }
      const std::string csv = evaluate_csv(p, s, zs, xs, ts);
      if (!csv_out.empty()) detail::write_text(csv_out, csv);
      else out << csv;
      return kOk;
    }

    double tol = is_pde(p.kind) ? pde::kPdeTolerance : verify::kDefaultTolerance;
    if (const double env = detail::env_tolerance(); env > 0.0) tol = env;
    if (p.tolerance) tol = *p.tolerance;
    if (tol_flag) {
      if (!(*tol_flag > 0.0)) throw DomainError("--tol must be positive");
      tol = *tol_flag;
    }
    const auto [doc, pass] = verify_problem(p, s, tol);
    out << doc.dump(2) << '\n';
    err << (pass ? "PASS" : "FAIL") << " max_rel=" << doc.at("max_rel").get<double>() << " tolerance=" << tol
        << '\n';
    return pass ? kOk : kVerifyFailed;
  } catch (const UnsupportedRegime& e) {
    err << "unsupported regime: " << e.what() << '\n';
    return kUnsupported;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return kConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kMalformed;
  } catch (const json::exception& e) {
    err << "malformed input: " << e.what() << '\n';
    return kMalformed;
  }
}

} // namespace fracsolve::cli

#endif // FRACSOLVE_CLI_HPP
