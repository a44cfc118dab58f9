// skewforms: command-line front end.
//
//   skewforms forms d|closed --form F [--frame FR]
//   skewforms forms wedge --a A --b B
//   skewforms forms loop --form F --loop L
//   skewforms chars --pde P --strip S|BUNDLE [--scan-events] [--du EXPR]
//   skewforms legendre --request R | --L EXPR [--m M] [--domain=lo:hi ...] [--grid N]
//   skewforms evolve --a1 EXPR --a2 EXPR | --grid G [--pde P --strip S]
//
// Exit status: 0 success, 2 invalid input, 3 domain error or degeneracy.
// Errors print one line on stderr: "ERROR <CODE>: <message>".

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "skewforms/io.hpp"

namespace fs = std::filesystem;
using namespace skewforms;
using io::ordered_json;

namespace {

struct RunConfig {
  std::string out = ".";
  std::uint64_t seed = 42;
  std::optional<double> h;
  std::optional<double> s_max;
  std::optional<double> tol;

  [[nodiscard]] ZeroTestOptions zero_test(bool use_tol) const {
    ZeroTestOptions z;
    z.seed = seed;
    if (use_tol && tol) z.tolerance = *tol;
    return z;
  }
  [[nodiscard]] fs::path path(const std::string& name) const { return fs::path(out) / name; }
};

void add_common(CLI::App* app, RunConfig& cfg) {
  app->add_option("--out", cfg.out, "output directory")->capture_default_str();
  app->add_option("--seed", cfg.seed, "zero-test sampler seed")->capture_default_str();
  app->add_option("--h", cfg.h, "integration step")->check(CLI::PositiveNumber);
  app->add_option("--smax", cfg.s_max, "integration length")->check(CLI::PositiveNumber);
  app->add_option("--tol", cfg.tol, "tolerance (zero test, strip admissibility or identity)")
      ->check(CLI::PositiveNumber);
}

// Error type thrown when the run produced its outputs but must signal failure.
struct Failure {
  int status;
  std::string code;
  std::string message;
};

void say(const std::string& key, const std::string& value) { std::cout << key << ": " << value << '\n'; }
std::string yes_no(bool b) { return b ? "true" : "false"; }

std::pair<double, double> parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("E_USAGE", "interval '" + text + "' must read lo:hi");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError("E_USAGE", "interval '" + text + "' must read lo:hi");
  }
}

// ---------------------------------------------------------------------------

struct FormsArgs {
  std::string form, frame, a, b, loop;
};

int cmd_forms(const std::string& op, const FormsArgs& args, const RunConfig& cfg) {
  ordered_json diag;
  diag["operation"] = op;
  if (op == "wedge") {
    const auto a = io::form_from_json(io::read_json(args.a));
    const auto b = io::form_from_json(io::read_json(args.b));
    const auto w = wedge(a, b).canonical();
    io::write_json(cfg.path("wedge.json"), io::form_to_json(w));
    diag["degree"] = w.degree();
    diag["zero"] = w.empty();
    io::write_json(cfg.path("diagnostics.json"), diag);
    say("degree", std::to_string(w.degree()));
    say("zero", yes_no(w.empty()));
    return 0;
  }

  const auto theta = io::form_from_json(io::read_json(args.form));
  if (op == "loop") {
    Loop loop = io::loop_from_json(io::read_json(args.loop));
    const double value = loop_integral(theta, loop);
    diag["value"] = value;
    diag["samples_per_edge"] = loop.samples_per_edge;
    diag["vertices"] = loop.vertices.size();
    io::write_json(cfg.path("diagnostics.json"), diag);
    say("loop integral", format_double(value));
    return 0;
  }

  const FrameSpec frame =
      args.frame.empty() ? FrameSpec(theta.dimension()) : io::frame_from_json(io::read_json(args.frame), theta.vars());
  const auto closure = is_closed(theta, frame, cfg.zero_test(true));
  if (op == "d") io::write_json(cfg.path("d.json"), io::form_to_json(exterior_derivative(theta, frame).canonical()));
  diag["closed"] = closure.closed;
  diag["residual"] = io::form_to_json(closure.residual);
  io::write_json(cfg.path("diagnostics.json"), diag);
  say("closed", yes_no(closure.closed));
  return 0;
}

// ---------------------------------------------------------------------------

struct CharsArgs {
  std::string pde, strip, du;
  bool scan_events = false;
  bool allow_inadmissible = false;
};

ordered_json trajectory_summary(const Trajectory& t, std::size_t index, std::optional<double> label) {
  ordered_json j;
  j["index"] = index + 1;
  if (label) j["label"] = *label;
  j["samples"] = t.samples.size();
  j["complete"] = t.complete();
  j["error"] = t.error ? ordered_json(*t.error) : ordered_json(nullptr);
  double mf = 0.0, ms = 0.0;
  for (const auto& s : t.samples) {
    mf = std::max(mf, s.f_residual);
    ms = std::max(ms, s.strip_residual);
  }
  j["max_F_residual"] = mf;
  j["max_strip_residual"] = ms;
  return j;
}

int cmd_chars(const CharsArgs& args, const RunConfig& cfg) {
  const auto problem = io::pde_from_json(io::read_json(args.pde));
  auto system = characteristic_system(problem);
  if (!args.du.empty()) system.du = parse(args.du, problem.names());
  const CharacteristicField field(problem, system);

  IntegrationOptions opt;
  if (cfg.tol) opt.strip_tolerance = *cfg.tol;
  opt.require_admissible = !args.allow_inadmissible;
  const double h = cfg.h.value_or(1e-3);
  const double s_max = cfg.s_max.value_or(1.0);

  const auto input = io::read_json(args.strip);
  ordered_json summary;
  summary["F"] = to_string(problem.F);
  summary["h"] = h;
  summary["s_max"] = s_max;
  ordered_json list = ordered_json::array();
  double max_f = 0.0, max_strip = 0.0;
  auto track = [&](const ordered_json& s) {
    max_f = std::max(max_f, s["max_F_residual"].get<double>());
    max_strip = std::max(max_strip, s["max_strip_residual"].get<double>());
  };

  if (!io::is_bundle(input)) {
    const auto traj = integrate_strip(field, io::strip_from_json(input), s_max, h, opt);
    io::write_text(cfg.path("traj_1.csv"), io::trajectory_csv(problem, traj));
    list.push_back(trajectory_summary(traj, 0, std::nullopt));
    track(list.back());
    summary["trajectories"] = list;
    summary["max_F_residual"] = max_f;
    summary["max_strip_residual"] = max_strip;
    io::write_json(cfg.path("summary.json"), summary);
    say("samples", std::to_string(traj.samples.size()));
    say("max F_residual", format_double(max_f));
    say("max strip_residual", format_double(max_strip));
    if (traj.error) throw Failure{3, "E_TRAJECTORY_ABORTED", *traj.error};
    return 0;
  }

  const auto bundle = io::bundle_from_json(input, problem.dimension());
  const auto result = solve_bundle(field, bundle, s_max, h, opt);
  for (std::size_t k = 0; k < result.trajectories.size(); ++k) {
    io::write_text(cfg.path("traj_" + std::to_string(k + 1) + ".csv"), io::trajectory_csv(problem, result.trajectories[k]));
    list.push_back(trajectory_summary(result.trajectories[k], k, bundle.labels[k]));
    track(list.back());
  }
  io::write_text(cfg.path("jacobians.csv"), io::jacobian_csv(result));
  summary["transverse"] = bundle.transverse + 1;
  summary["trajectories"] = list;
  summary["max_F_residual"] = max_f;
  summary["max_strip_residual"] = max_strip;
  const auto aborted = std::count_if(result.trajectories.begin(), result.trajectories.end(),
                                     [](const Trajectory& t) { return !t.complete(); });
  summary["aborted"] = aborted;
  say("trajectories", std::to_string(result.trajectories.size()));
  say("aborted", std::to_string(aborted));
  say("max F_residual", format_double(max_f));
  if (args.scan_events) {
    const auto events = jacobian_scan(result);
    io::write_json(cfg.path("events.json"), io::events_to_json(events));
    summary["events"] = events.size();
    say("events", std::to_string(events.size()));
    if (!events.empty()) {
      double lo = events.front().s_star, hi = lo;
      for (const auto& e : events) {
        lo = std::min(lo, e.s_star);
        hi = std::max(hi, e.s_star);
      }
      say("s_star range", format_double(lo) + " " + format_double(hi));
    }
  }
  io::write_json(cfg.path("summary.json"), summary);
  return 0;
}

// ---------------------------------------------------------------------------

struct LegendreArgs {
  std::string request, L;
  int m = 1;
  std::vector<std::string> domain;
  int grid = 201;
};

int cmd_legendre(const LegendreArgs& args, const RunConfig& cfg) {
  io::LegendreRequest req;
  if (!args.request.empty()) {
    req = io::legendre_request_from_json(io::read_json(args.request));
  } else {
    if (args.L.empty()) throw ValidationError("E_USAGE", "legendre needs --request or --L");
    req.lagrangian = Lagrangian::from_text(args.L, args.m);
    if (args.domain.empty()) {
      req.domain.assign(static_cast<std::size_t>(args.m), {-1.0, 1.0});
    } else {
      for (const auto& d : args.domain) req.domain.push_back(parse_interval(d));
    }
    req.grid = args.grid;
  }
  const auto zt = cfg.zero_test(true);
  const auto& lag = req.lagrangian;

  ordered_json diag;
  diag["m"] = lag.m();
  diag["L"] = to_string(lag.L);
  diag["grid"] = req.grid;
  const auto rep = degeneracy_check(lag, req.domain, 101, 1e-10, zt);
  diag["hessian_det"] = to_string(rep.determinant);
  diag["identically_degenerate"] = rep.identically_degenerate;
  diag["zeros"] = rep.zeros;
  say("hessian_det", to_string(rep.determinant));
  auto fail = [&](const DegeneracyError& e) {
    diag["error"] = e.what();
    io::write_json(cfg.path("diagnostics.json"), diag);
    throw Failure{3, e.code(), e.what()};
  };

  LegendreTable table;
  try {
    table = legendre_transform(lag, req.domain, req.grid, zt);
  } catch (const DegeneracyError& e) {
    fail(e);
  }
  io::write_text(cfg.path("legendre_table.csv"), io::legendre_csv(table));
  diag["samples"] = table.H.size();
  if (table.closed_form) {
    const Program H(*table.closed_form, momentum_names(lag.m()));
    double err = 0.0;
    for (std::size_t i = 0; i < table.H.size(); ++i) err = std::max(err, std::abs(H(table.p[i]) - table.H[i]));
    diag["closed_form"] = to_string(*table.closed_form);
    diag["closed_form_max_error"] = err;
    say("closed form H", to_string(*table.closed_form));
    say("max |H - closed form|", format_double(err));
  } else {
    diag["closed_form"] = nullptr;
  }
  if (lag.m() == 1 && rep.zeros.empty() && req.grid >= 3) {
    const double inv = involution_error(lag, req.domain, req.grid, zt);
    diag["involution_error"] = inv;
    say("involution error", format_double(inv));
  } else {
    diag["involution_error"] = nullptr;
  }
  io::write_json(cfg.path("diagnostics.json"), diag);
  return 0;
}

// ---------------------------------------------------------------------------

struct EvolveArgs {
  std::string a1, a2, grid, form, pde, strip;
  std::string vars = "xi1,xi2";
  std::string eval_grid = "-1:1:21";
  std::string a1_name = "A1", a2_name = "A2";
};

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(text.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

GridSpec parse_eval_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? first : text.find(':', first + 1);
  if (second == std::string::npos) throw ValidationError("E_USAGE", "--eval-grid must read lo:hi:n");
  const auto [lo, hi] = parse_interval(text.substr(0, second));
  const long n = std::stol(text.substr(second + 1));
  if (n < 3 || !(hi > lo)) throw ValidationError("E_USAGE", "--eval-grid needs lo < hi and n >= 3");
  return GridSpec::square(lo, hi, static_cast<std::size_t>(n));
}

std::string k_csv(const EvolutionaryRelation& rel) {
  std::string out = "xi1,xi2,K\n";
  if (rel.kind == EvolutionaryRelation::Kind::Grid) {
    const auto& g = rel.grid;
    for (std::size_t i = 0; i < g.shape[0]; ++i)
      for (std::size_t j = 0; j < g.shape[1]; ++j)
        out += format_double(g.coordinate(0, i)) + "," + format_double(g.coordinate(1, j)) + "," +
               format_double(rel.K_grid[g.flat(i, j)]) + "\n";
    return out;
  }
  const auto& g = rel.evaluation;
  const Program k(rel.K, rel.vars);
  for (std::size_t i = 0; i < g.shape[0]; ++i)
    for (std::size_t j = 0; j < g.shape[1]; ++j) {
      const std::array<double, 2> pt{g.coordinate(0, i), g.coordinate(1, j)};
      std::string value = "nan";
      try {
        value = format_double(k(pt));
      } catch (const DomainError&) {
      }
      out += format_double(pt[0]) + "," + format_double(pt[1]) + "," + value + "\n";
    }
  return out;
}

int cmd_evolve(const EvolveArgs& args, const RunConfig& cfg) {
  ordered_json diag;
  const auto vars = split_names(args.vars);
  std::optional<EvolutionaryRelation> rel;
  std::optional<PdeProblem> problem;
  if (!args.pde.empty()) problem = io::pde_from_json(io::read_json(args.pde));

  Expr A1, A2;
  if (!args.grid.empty()) {
    rel = build_relation(io::grid_from_json(io::read_json(args.grid)), args.a1_name, args.a2_name);
    diag["kind"] = "grid";
  } else if (!args.form.empty()) {
    rel = build_relation(io::form_from_json(io::read_json(args.form)));
    A1 = rel->A1;
    A2 = rel->A2;
    diag["kind"] = "symbolic";
  } else {
    if (args.a1.empty() || args.a2.empty()) throw ValidationError("E_USAGE", "evolve needs --a1 and --a2, --form or --grid");
    std::vector<std::string> allowed = vars;
    if (problem) {
      const auto names = problem->names();
      allowed.insert(allowed.end(), names.begin(), names.end());
    }
    A1 = parse(args.a1, allowed);
    A2 = parse(args.a2, allowed);
    // Coefficients that read strip values (p, u) are only meaningful on a trajectory.
    auto on_xi = [&](const Expr& e) {
      const auto fv = free_variables(e);
      return std::all_of(fv.begin(), fv.end(), [&](const std::string& v) { return v == vars[0] || v == vars[1]; });
    };
    if (on_xi(A1) && on_xi(A2)) rel = build_relation(A1, A2, vars);
    diag["kind"] = "symbolic";
  }

  if (rel) {
    if (rel->kind == EvolutionaryRelation::Kind::Symbolic) {
      rel->evaluation = parse_eval_grid(args.eval_grid);
      diag["K"] = to_string(rel->K);
    }
    if (cfg.tol) rel->identity_tolerance = *cfg.tol;
    const auto rep = nonidentity_report(*rel, cfg.zero_test(false));
    diag["verdict"] = rep.identical ? "identical" : "non-identical";
    diag["max_abs_K"] = rep.max_abs;
    diag["location"] = rep.location;
    diag["flat_index"] = rep.flat_index;
    diag["skipped_nodes"] = rep.skipped_nodes;
    io::write_text(cfg.path("K.csv"), k_csv(*rel));
    if (rel->kind == EvolutionaryRelation::Kind::Symbolic) say("K", to_string(rel->K));
    say("verdict", rep.identical ? "identical" : "non-identical");
    say("max |K|", format_double(rep.max_abs));
  } else {
    diag["verdict"] = nullptr;
  }

  if (!args.strip.empty()) {
    if (!problem) throw ValidationError("E_USAGE", "--strip needs --pde");
    if (!rel || rel->kind == EvolutionaryRelation::Kind::Symbolic) {
      IntegrationOptions opt;
      const auto traj = integrate_strip(*problem, io::strip_from_json(io::read_json(args.strip)),
                                        cfg.s_max.value_or(1.0), cfg.h.value_or(1e-3), opt);
      const auto id = identity_on_structure(traj, *problem, A1, A2, std::nullopt, vars);
      ordered_json j;
      j["delta_psi"] = id.delta_psi;
      j["integral"] = id.integral;
      j["residual"] = id.residual;
      j["samples"] = traj.samples.size();
      diag["identity_on_structure"] = j;
      say("identity residual", format_double(id.residual));
    } else {
      throw ValidationError("E_USAGE", "identity on structure needs symbolic coefficients");
    }
  }
  io::write_json(cfg.path("diagnostics.json"), diag);
  return 0;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int report(int status, const std::string& code, const std::string& message) {
  std::cerr << "ERROR " << code << ": " << one_line(message) << '\n';
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exterior forms, characteristics, Legendre transforms and evolutionary relations"};
  // "-h" is left free: --h is the step size.
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  RunConfig cfg;

  FormsArgs fa;
  auto* forms = app.add_subcommand("forms", "exterior form operations");
  forms->require_subcommand(1);
  std::string forms_op;
  for (const char* op : {"d", "closed", "wedge", "loop"}) {
    auto* sub = forms->add_subcommand(op);
    add_common(sub, cfg);
    if (std::string(op) == "wedge") {
      sub->add_option("--a", fa.a, "first form file")->required()->check(CLI::ExistingFile);
      sub->add_option("--b", fa.b, "second form file")->required()->check(CLI::ExistingFile);
    } else {
      sub->add_option("--form", fa.form, "form file")->required()->check(CLI::ExistingFile);
      if (std::string(op) == "loop")
        sub->add_option("--loop", fa.loop, "loop file")->required()->check(CLI::ExistingFile);
      else
        sub->add_option("--frame", fa.frame, "frame file")->check(CLI::ExistingFile);
    }
    sub->callback([&forms_op, op] { forms_op = op; });
  }

  CharsArgs ca;
  auto* chars = app.add_subcommand("chars", "integrate characteristic strips");
  add_common(chars, cfg);
  chars->add_option("--pde", ca.pde, "PDE file")->required()->check(CLI::ExistingFile);
  chars->add_option("--strip", ca.strip, "strip or bundle file")->required()->check(CLI::ExistingFile);
  chars->add_flag("--scan-events", ca.scan_events, "detect Jacobian sign changes in a bundle");
  chars->add_flag("--allow-inadmissible", ca.allow_inadmissible, "integrate strips with |F| above tolerance");
  chars->add_option("--du", ca.du, "override du/ds");

  LegendreArgs la;
  auto* legendre = app.add_subcommand("legendre", "Legendre transform and degeneracy analysis");
  add_common(legendre, cfg);
  legendre->add_option("--request", la.request, "transform request file")->check(CLI::ExistingFile);
  legendre->add_option("--L", la.L, "Lagrangian over v (m = 1) or v1, v2 (m = 2)");
  legendre->add_option("--m", la.m, "number of velocities")->check(CLI::Range(1, 2))->capture_default_str();
  legendre->add_option("--domain", la.domain, "interval lo:hi per axis");
  legendre->add_option("--grid", la.grid, "samples per axis")->check(CLI::Range(2, 100000))->capture_default_str();

  EvolveArgs ea;
  auto* evolve = app.add_subcommand("evolve", "evolutionary relation diagnostics");
  add_common(evolve, cfg);
  evolve->add_option("--a1", ea.a1, "coefficient of dxi1");
  evolve->add_option("--a2", ea.a2, "coefficient of dxi2");
  evolve->add_option("--vars", ea.vars, "relation variables")->capture_default_str();
  evolve->add_option("--eval-grid", ea.eval_grid, "lo:hi:n grid for max |K|")->capture_default_str();
  evolve->add_option("--grid", ea.grid, "grid-field file")->check(CLI::ExistingFile);
  evolve->add_option("--a1-name", ea.a1_name, "grid component for A1")->capture_default_str();
  evolve->add_option("--a2-name", ea.a2_name, "grid component for A2")->capture_default_str();
  evolve->add_option("--form", ea.form, "1-form file")->check(CLI::ExistingFile);
  evolve->add_option("--pde", ea.pde, "PDE file for identity on a trajectory")->check(CLI::ExistingFile);
  evolve->add_option("--strip", ea.strip, "initial strip for identity on a trajectory")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(2, "E_USAGE", e.what());
  }

  try {
    if (*forms) return cmd_forms(forms_op, fa, cfg);
    if (*chars) return cmd_chars(ca, cfg);
    if (*legendre) return cmd_legendre(la, cfg);
    if (*evolve) return cmd_evolve(ea, cfg);
  } catch (const Failure& f) {
    return report(f.status, f.code, f.message);
  } catch (const DomainError& e) {
    return report(3, e.code(), e.what());
  } catch (const DegeneracyError& e) {
    return report(3, e.code(), e.what());
  } catch (const InconclusiveError& e) {
    return report(3, e.code(), e.what());
  } catch (const Error& e) {
    return report(2, e.code(), e.what());
  } catch (const io::json::exception& e) {
    return report(2, "E_FORMAT", e.what());
  } catch (const fs::filesystem_error& e) {
    return report(2, "E_IO", e.what());
  } catch (const std::exception& e) {
    return report(1, "E_INTERNAL", e.what());
  }
  return 0;
}
