#include "trace_shape/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "trace_shape/acceptance.hpp"
#include "trace_shape/errors.hpp"
#include "trace_shape/fem2d.hpp"
#include "trace_shape/hole_opt.hpp"
#include "trace_shape/io.hpp"
#include "trace_shape/parallel.hpp"
#include "trace_shape/radial.hpp"
#include "trace_shape/shape_deriv.hpp"
#include "trace_shape/sp_ode.hpp"

namespace trace_shape::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

constexpr const char* kModule = "cli";

const std::vector<std::string> kCommands = {"radial",           "sp-curve",     "threshold",       "solve2d",
                                            "shape-derivative", "sweep-center", "optimize-center", "check"};

const std::map<std::string, std::string> kDescriptions = {
    {"radial", "radial extremal of a centered hole"},
    {"sp-curve", "S_p(R) by integrating the radial ODE"},
    {"threshold", "Q(R) = p S_p(R) / (p - 1 + S_p(R))"},
    {"solve2d", "finite-element extremal for an off-center hole"},
    {"shape-derivative", "boundary and volume shape derivatives with a finite-difference check"},
    {"sweep-center", "S_q along hole translations and the second-derivative comparison"},
    {"optimize-center", "projected gradient ascent on the hole center"},
    {"check", "run the acceptance criteria"},
};

std::string block_name(const std::string& command) {
  std::string s = command;
  for (char& c : s) {
    if (c == '-') c = '_';
  }
  return s;
}

struct Flags {
  std::string config;
  std::string out = ".";
  std::string format = "csv";
  std::optional<int> threads;
  std::optional<long long> seed;
};

// Resolved configuration: the problem, one command block with defaults filled
// in, and the seed. Its hash is embedded in every artifact.
struct RunConfig {
  std::string command;
  TraceProblem problem;
  json block;
  long long seed = 0;
  json resolved;
  std::string hash;
};

json with_defaults(const json& given, const json& defaults, const std::string& where) {
  if (!given.is_object()) throw TraceError(ErrorKind::ConfigError, kModule, where + " must be a JSON object");
  json out = defaults;
  for (const auto& [key, value] : given.items()) {
    if (!defaults.contains(key)) {
      throw TraceError(ErrorKind::ConfigError, kModule, "unknown key \"" + key + "\" in " + where);
    }
    out[key] = value;
  }
  return out;
}

json default_block(const std::string& command, const TraceProblem& p) {
  const double L = p.R - p.r;
  if (command == "radial") return {{"M", 512}, {"random_init", false}};
  if (command == "sp-curve") return {{"R_end", p.R}, {"samples", 400}};
  if (command == "threshold") return {{"R_min", 1.01 * p.r}, {"R_max", 100.0 * p.r}, {"samples", 400}};
  if (command == "solve2d") return {{"layers", 64}, {"angular", 128}};
  if (command == "shape-derivative") {
    return {{"layers", 64},
            {"angular", 128},
            {"field", io::field_spec_to_json(FieldSpec{})},
            {"finite_difference", true},
            {"fd_steps", json::array()}};
  }
  if (command == "sweep-center") {
    return {{"layers", 64},
            {"angular", 128},
            {"offsets", {-0.02 * L, -0.01 * L, 0.0, 0.01 * L, 0.02 * L}}};
  }
  if (command == "optimize-center") {
    return {{"layers", 16},
            {"angular", 64},
            {"init_center", {0.05 * L, 0.0}},
            {"max_iter", 20},
            {"gradient_tol", 1e-3},
            {"margin", 0.5}};
  }
  return json::object();  // check
}

RunConfig resolve(const std::string& command, const Flags& flags) {
  json cfg = flags.config.empty() ? json::object() : io::read_json_file(flags.config);
  if (!cfg.is_object()) throw TraceError(ErrorKind::ConfigError, kModule, "config must be a JSON object");
  RunConfig rc;
  rc.command = command;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "problem" || key == "seed") continue;
    const bool is_block = std::any_of(kCommands.begin(), kCommands.end(),
                                      [&](const std::string& c) { return block_name(c) == key; });
    if (!is_block) throw TraceError(ErrorKind::ConfigError, kModule, "unknown top-level key \"" + key + "\"");
    if (key != block_name(command)) {
      throw TraceError(ErrorKind::ConfigError, kModule,
                       "config holds a \"" + key + "\" block but the command is " + command);
    }
  }
  rc.problem = io::problem_from_json(cfg.value("problem", json::object()));
  if (cfg.contains("seed")) rc.seed = cfg.at("seed").get<long long>();
  if (flags.seed) rc.seed = *flags.seed;
  rc.block = with_defaults(cfg.value(block_name(command), json::object()), default_block(command, rc.problem),
                           block_name(command));
  if (command == "shape-derivative") {
    // normalize the field block so equivalent configs hash identically
    rc.block["field"] = io::field_spec_to_json(io::field_spec_from_json(rc.block["field"]));
  }
  rc.resolved = {{"command", command},
                 {"problem", io::problem_to_json(rc.problem)},
                 {block_name(command), rc.block},
                 {"seed", rc.seed}};
  rc.hash = io::config_hash(rc.resolved);
  return rc;
}

class Writer {
 public:
  Writer(const Flags& flags, std::string hash) : dir_(flags.out), json_(flags.format == "json"), hash_(std::move(hash)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw TraceError(ErrorKind::IoError, kModule, "cannot create " + dir_.string() + ": " + ec.message());
  }

  fs::path table(const std::string& stem, const io::Table& t, const json& summary = json::object()) const {
    if (json_) {
      json j = io::to_json(t, hash_);
      for (const auto& [k, v] : summary.items()) j[k] = v;
      return text(stem + ".json", j.dump(2) + "\n");
    }
    return text(stem + ".csv", io::to_csv(t, hash_));
  }

  fs::path document(const std::string& stem, json j) const {
    j["config_hash"] = hash_;
    return text(stem + ".json", j.dump(2) + "\n");
  }

 private:
  fs::path text(const std::string& name, const std::string& body) const {
    const fs::path path = dir_ / name;
    io::write_text_file(path, body);
    return path;
  }

  fs::path dir_;
  bool json_;
  std::string hash_;
};

MeshResolution resolution_of(const json& block) {
  return {block.at("layers").get<int>(), block.at("angular").get<int>()};
}

int execute(const RunConfig& rc, const Flags& flags, std::ostream& out) {
  const std::string& cmd = rc.command;
  if (cmd == "check") {
    const auto results = run_acceptance();
    print_acceptance(results, out);
    const bool ok = std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
    return ok ? 0 : 3;
  }

  const ValidatedProblem problem = validate_problem(rc.problem);
  const Writer writer(flags, rc.hash);
  const json& b = rc.block;

  if (cmd == "radial") {
    RadialSolveOptions opts;
    opts.M = b.at("M").get<int>();
    if (b.at("random_init").get<bool>()) {
      opts.init = random_radial_profile(problem, opts.M, static_cast<std::uint64_t>(rc.seed));
    }
    const TraceResult res = solve_radial_extremal(problem, opts);
    io::Table t{{"s", "u"}, {}};
    for (std::size_t i = 0; i < res.profile().nodes.size(); ++i) {
      t.rows.push_back({res.profile().nodes[i], res.profile().values[i]});
    }
    const auto path = writer.table("radial", t, {{"S_q", res.constant}, {"residual", res.residual}});
    out << "S_q = " << io::format_number(res.constant) << " (" << res.iterations << " iterations) -> "
        << path.string() << "\n";
  } else if (cmd == "sp-curve" || cmd == "threshold") {
    const bool thr = cmd == "threshold";
    const double R_end = b.at(thr ? "R_max" : "R_end").get<double>();
    const SpCurve curve = integrate_sp_ode(problem.p(), problem.N(), problem.r(), R_end,
                                           {.ode_tol = problem.tol().ode_tol, .samples = b.at("samples").get<int>()});
    io::Table t{thr ? std::vector<std::string>{"R", "S_p", "Q"} : std::vector<std::string>{"R", "S_p"}, {}};
    const double R_min = thr ? b.at("R_min").get<double>() : curve.R().front();
    if (thr && !curve.contains(R_min)) {
      throw TraceError(ErrorKind::OutOfRange, "sp_ode", "R_min must lie in [1.01 r, R_max]");
    }
    for (std::size_t i = 0; i < curve.R().size(); ++i) {
      const double R = curve.R()[i];
      if (R < R_min) continue;
      if (thr) {
        t.rows.push_back({R, curve.S()[i], q_threshold(curve, R)});
      } else {
        t.rows.push_back({R, curve.S()[i]});
      }
    }
    const auto path = writer.table(thr ? "threshold" : "sp_curve", t, {{"error_estimate", curve.error_estimate()}});
    out << t.rows.size() << " samples, error estimate " << io::format_number(curve.error_estimate()) << " -> "
        << path.string() << "\n";
  } else if (cmd == "solve2d") {
    const MeshResolution res = resolution_of(b);
    const auto mesh = std::make_shared<const Mesh2D>(generate_annular_mesh(problem, res.layers, res.angular));
    const TraceResult sol = solve_trace_extremal_2d(mesh, problem);
    io::Table t{{"vertex_index", "x", "y", "u"}, {}};
    for (std::size_t i = 0; i < mesh->vertices.size(); ++i) {
      t.rows.push_back({static_cast<double>(i), mesh->vertices[i].x(), mesh->vertices[i].y(), sol.field().values[i]});
    }
    const auto path = writer.table("solve2d", t, {{"S_q", sol.constant}, {"residual", sol.residual}});
    writer.document("mesh", io::mesh_to_json(*mesh));
    out << "S_q = " << io::format_number(sol.constant) << ", residual " << io::format_number(sol.residual) << " -> "
        << path.string() << "\n";
  } else if (cmd == "shape-derivative") {
    const MeshResolution res = resolution_of(b);
    const auto mesh = std::make_shared<const Mesh2D>(generate_annular_mesh(problem, res.layers, res.angular));
    const DeformationField field = make_deformation_field(problem, io::field_spec_from_json(b.at("field")));
    const TraceResult sol = solve_trace_extremal_2d(mesh, problem);
    const ShapeDerivative d = shape_derivative(sol, field, problem.p(), problem.q());
    json report = {{"boundary_form", d.boundary_form}, {"volume_form", d.volume_form}, {"S_q", sol.constant}};
    if (b.at("finite_difference").get<bool>()) {
      const auto fd = finite_difference_slope(problem, mesh, field, b.at("fd_steps").get<std::vector<double>>());
      report["fd_slope"] = fd.slope;
      report["fd_table"] = fd.table;
    } else {
      report["fd_slope"] = nullptr;
      report["fd_table"] = json::array();
    }
    const auto path = writer.document("shape_derivative", report);
    out << "boundary " << io::format_number(d.boundary_form) << ", volume " << io::format_number(d.volume_form)
        << " -> " << path.string() << "\n";
  } else if (cmd == "sweep-center") {
    const SweepReport rep = sweep_center(problem, b.at("offsets").get<std::vector<double>>(), resolution_of(b));
    io::Table t{{"t", "Sq"}, {}};
    for (std::size_t i = 0; i < rep.offsets.size(); ++i) t.rows.push_back({rep.offsets[i], rep.constants[i]});
    const json summary = {{"h2_numeric", rep.h2_numeric}, {"h2_closed", rep.h2_closed}, {"Q", rep.Q}, {"q", rep.q}};
    const auto path = writer.table("sweep_center", t);
    writer.document("sweep_summary", summary);
    out << "h2_numeric " << io::format_number(rep.h2_numeric) << ", h2_closed " << io::format_number(rep.h2_closed)
        << " -> " << path.string() << "\n";
  } else if (cmd == "optimize-center") {
    OptimizeOptions opts;
    opts.max_iter = b.at("max_iter").get<int>();
    opts.gradient_tol = b.at("gradient_tol").get<double>();
    opts.margin = b.at("margin").get<double>();
    opts.resolution = resolution_of(b);
    const auto init = b.at("init_center").get<std::vector<double>>();
    if (init.size() != 2) throw TraceError(ErrorKind::ConfigError, kModule, "init_center needs two components");
    const CenterTrajectory traj = optimize_center(problem, {init[0], init[1]}, opts);
    io::Table t{{"iter", "cx", "cy", "Sq", "gx", "gy"}, {}};
    for (std::size_t i = 0; i < traj.iterates.size(); ++i) {
      const auto& it = traj.iterates[i];
      t.rows.push_back({static_cast<double>(i), it.center[0], it.center[1], it.value, it.gradient[0], it.gradient[1]});
    }
    const auto path = writer.table("optimize_center", t,
                                   {{"margin_active", traj.margin_active}, {"converged", traj.converged}});
    out << traj.iterates.size() << " iterates, final S_q " << io::format_number(traj.iterates.back().value)
        << (traj.margin_active ? " (margin active)" : "") << " -> " << path.string() << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sobolev trace constants of a ball with a hole", "trace_shape"};
  app.require_subcommand(1);
  Flags flags;
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, kDescriptions.at(name));
    sub->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--format", flags.format, "artifact format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", flags.threads, "workers for sweeps and finite-difference stencils")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.seed, "seed for randomized initializations");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (flags.threads) set_worker_threads(*flags.threads);
    const RunConfig rc = resolve(command, flags);
    return execute(rc, flags, out);
  } catch (const TraceError& e) {
    err << "error: " << e.what() << "\n";
    return is_validation_error(e.kind()) ? 2 : 3;
  } catch (const io::json::exception& e) {
    err << "error: " << kModule << ": ConfigError: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace trace_shape::cli
