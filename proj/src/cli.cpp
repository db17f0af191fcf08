#include "hardcore/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hardcore/io.hpp"

namespace hardcore::cli {

namespace {

// ---- config-file pre-pass ------------------------------------------------

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::string trim(const std::string& s) {
  std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// key = value pairs, '#' and ';' comments, sections ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config file not readable: " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';' || t[0] == '[') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line is not key=value: " + t);
    std::string key = normalize_key(trim(t.substr(0, eq)));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw UsageError("config line is not key=value: " + t);
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

// Long option names the user passed explicitly (--key or --key=value).
std::vector<std::string> explicit_flags(const std::vector<std::string>& args) {
  std::vector<std::string> flags;
  for (const std::string& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    std::string name = a.substr(2);
    std::size_t eq = name.find('=');
    if (eq != std::string::npos) name = name.substr(0, eq);
    flags.push_back(normalize_key(name));
  }
  return flags;
}

// ---- CLI11 wiring --------------------------------------------------------

struct Parsed {
  RunConfig config;
  CLI::App app{"multi-state hard core model on b-ary trees"};
  std::vector<CLI::App*> commands;
};

void add_common(CLI::App* cmd, RunConfig& c) {
  auto take_last = [](CLI::Option* o) {
    o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  take_last(cmd->add_option("--format", c.output.format, "output format")
                ->check(CLI::IsMember({"csv", "json"})));
  take_last(cmd->add_option("--out", c.output.path, "output path (default stdout)"));
  take_last(cmd->add_option("--seed", c.seed, "RNG seed"));
  take_last(cmd->add_option("--config", "ini config file; flags win over file keys"));
  take_last(cmd->add_option("--tol", c.numeric.tol, "convergence tolerance"));
  take_last(cmd->add_option("--gap-tol", c.numeric.gap_tol, "coexistence threshold"));
  take_last(cmd->add_option("--max-levels", c.numeric.max_levels,
                            "level cap per chain"));
}

void add_model(CLI::App* cmd, RunConfig& c, bool with_lambda = true) {
  auto take_last = [](CLI::Option* o) {
    o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  take_last(cmd->add_option("--b", c.b, "branching factor"));
  take_last(cmd->add_option("--C", c.C, "per-vertex capacity"));
  if (with_lambda) take_last(cmd->add_option("--lambda", c.lambda, "activity"));
}

void add_tree(CLI::App* cmd, RunConfig& c) {
  auto take_last = [](CLI::Option* o) {
    o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  take_last(cmd->add_option("--depth", c.depth, "levels of free vertices"));
  take_last(cmd->add_option("--bc", c.bc, "boundary: empty|full|const:K"));
}

Parsed* build_app(Parsed* parsed) {
  RunConfig& c = parsed->config;
  CLI::App& app = parsed->app;
  app.require_subcommand(1);

  auto take_last = [](CLI::Option* o) {
    o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };

  CLI::App* exact = app.add_subcommand("exact", "exact root law on a finite tree");
  add_model(exact, c);
  add_tree(exact, c);
  add_common(exact, c);

  CLI::App* recurse = app.add_subcommand(
      "recurse", "iterate the level recursion from a boundary seed");
  add_model(recurse, c);
  add_tree(recurse, c);
  add_common(recurse, c);

  CLI::App* fixpoints =
      app.add_subcommand("fixpoints", "fixed points of a scalar map");
  add_model(fixpoints, c);
  take_last(fixpoints->add_option("--map", c.map_name, "J|J2|H")
                ->check(CLI::IsMember({"J", "J2", "H"})));
  take_last(fixpoints->add_option("--gamma", c.gamma, "H map parameter"));
  take_last(fixpoints->add_option("--kappa", c.kappa,
                                  "damping; >= 0 selects lambda/(kappa+lambda)*J2"));
  add_common(fixpoints, c);

  CLI::App* critical =
      app.add_subcommand("critical", "bracket the critical activity");
  add_model(critical, c, /*with_lambda=*/false);
  take_last(critical->add_option("--bracket", c.bracket, "initial lo,hi"));
  take_last(critical->add_option("--bracket-tol", c.bracket_tol,
                                 "final bracket width"));
  add_common(critical, c);

  CLI::App* scan = app.add_subcommand(
      "scan", "coexistence indicator over an activity grid");
  add_model(scan, c, /*with_lambda=*/false);
  take_last(scan->add_option("--grid", c.grid, "lo:hi:n activity grid")
                ->required());
  take_last(scan->add_option("--workers", c.workers, "worker threads (0 = auto)"));
  add_common(scan, c);

  CLI::App* order =
      app.add_subcommand("order", "transition order at the critical activity");
  add_model(order, c, /*with_lambda=*/false);
  take_last(order->add_option("--lambda-cr", c.lambda_cr, "critical activity")
                ->required());
  order->add_option("--offsets", c.offsets, "relative offsets above lambda-cr");
  add_common(order, c);

  CLI::App* window = app.add_subcommand(
      "window", "probe the large-b uniqueness/coexistence window");
  add_model(window, c, /*with_lambda=*/false);
  add_common(window, c);

  CLI::App* sample = app.add_subcommand(
      "sample", "heat-bath sampler with triple coupling");
  add_model(sample, c);
  add_tree(sample, c);
  take_last(sample->add_option("--sweeps", c.sweeps, "total sweeps incl. burn-in"));
  take_last(sample->add_option("--burn-in", c.burn_in, "discarded sweeps"));
  add_common(sample, c);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "loss-network event simulation on a small graph");
  add_model(simulate, c);
  take_last(simulate->add_option("--graph", c.graph,
                                 "single|k2|complete:K|path:K|cycle:K"));
  take_last(simulate->add_option("--events", c.events, "event count"));
  add_common(simulate, c);

  parsed->commands = {exact, recurse, fixpoints, critical, scan,
                      order,  window,  sample,    simulate};
  return parsed;
}

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0)
      return args[i].substr(std::string("--config=").size());
  }
  return "";
}

// ---- field validation ----------------------------------------------------

std::pair<double, double> parse_pair(const std::string& text, char sep,
                                     const std::string& field) {
  std::size_t cut = text.find(sep);
  if (cut == std::string::npos)
    throw UsageError(field + " must be lo" + sep + "hi");
  try {
    return {std::stod(text.substr(0, cut)), std::stod(text.substr(cut + 1))};
  } catch (const std::exception&) {
    throw UsageError(field + " must be numeric lo" + sep + "hi");
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::size_t c1 = text.find(':');
  std::size_t c2 = text.rfind(':');
  if (c1 == std::string::npos || c2 == c1)
    throw UsageError("grid must be lo:hi:n");
  double lo, hi;
  long n;
  try {
    lo = std::stod(text.substr(0, c1));
    hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    n = std::stol(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw UsageError("grid must be numeric lo:hi:n");
  }
  if (n < 1) throw UsageError("grid needs n >= 1 points");
  if (lo <= 0) throw UsageError("grid activities must be positive");
  if (hi < lo) throw UsageError("grid needs hi >= lo");
  std::vector<double> lambdas(n);
  for (long i = 0; i < n; ++i)
    lambdas[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return lambdas;
}

BoundaryCondition parse_bc(const std::string& text, int C) {
  if (text == "empty") return BoundaryCondition::empty();
  if (text == "full") return BoundaryCondition::full();
  if (text.rfind("const:", 0) == 0) {
    int k;
    try {
      k = std::stoi(text.substr(6));
    } catch (const std::exception&) {
      throw UsageError("bc const spin must be an integer");
    }
    if (k < 0 || k > C) throw UsageError("bc const spin must lie in 0..C");
    return BoundaryCondition::constant(k);
  }
  throw UsageError("bc must be empty, full, or const:K");
}

LossGraph parse_graph(const std::string& text) {
  auto tail_int = [&](std::size_t prefix, const char* field) {
    try {
      return std::stoi(text.substr(prefix));
    } catch (const std::exception&) {
      throw UsageError(std::string(field) + " size must be an integer");
    }
  };
  if (text == "single") return LossGraph::single();
  if (text == "k2") return LossGraph::complete(2);
  if (text.rfind("complete:", 0) == 0)
    return LossGraph::complete(tail_int(9, "complete graph"));
  if (text.rfind("path:", 0) == 0) return LossGraph::path(tail_int(5, "path"));
  if (text.rfind("cycle:", 0) == 0) return LossGraph::cycle(tail_int(6, "cycle"));
  throw UsageError("graph must be single, k2, complete:K, path:K, or cycle:K");
}

void validate(RunConfig& c) {
  if (c.b < 2) throw UsageError("b must be >= 2");
  if (c.C < 1) throw UsageError("C must be >= 1");
  if (c.numeric.tol <= 0) throw UsageError("tol must be positive");
  if (c.numeric.gap_tol <= 0) throw UsageError("gap-tol must be positive");
  if (c.numeric.max_levels < 2) throw UsageError("max-levels must be >= 2");

  const bool needs_lambda = c.command == "exact" || c.command == "recurse" ||
                            c.command == "sample" || c.command == "simulate" ||
                            (c.command == "fixpoints" && c.map_name != "H");
  if (needs_lambda && !(c.lambda > 0 && std::isfinite(c.lambda)))
    throw UsageError("lambda must be positive");

  const bool needs_tree = c.command == "exact" || c.command == "recurse" ||
                          c.command == "sample";
  if (needs_tree) {
    if (c.depth < 1) throw UsageError("depth must be >= 1");
    parse_bc(c.bc, c.C);  // reject malformed bc early
  }
  if (c.command == "fixpoints" && c.map_name == "H" && !(c.gamma > 0))
    throw UsageError("gamma must be positive");
  if (c.command == "critical") {
    auto [lo, hi] = parse_pair(c.bracket, ',', "bracket");
    if (!(lo > 0) || !(hi > lo)) throw UsageError("bracket needs 0 < lo < hi");
    if (!(c.bracket_tol > 0)) throw UsageError("bracket-tol must be positive");
  }
  if (c.command == "order") {
    if (!(c.lambda_cr > 0)) throw UsageError("lambda-cr must be positive");
    if (c.offsets.empty()) throw UsageError("offsets must be non-empty");
    for (double o : c.offsets)
      if (!(o > 0)) throw UsageError("offsets must be positive");
  }
  if (c.command == "scan") parse_grid(c.grid);
  if (c.command == "sample") {
    if (c.burn_in < 0) throw UsageError("burn-in must be >= 0");
    if (c.sweeps <= c.burn_in) throw UsageError("sweeps must exceed burn-in");
  }
  if (c.command == "simulate") {
    parse_graph(c.graph);
    if (c.events < 1) throw UsageError("events must be >= 1");
  }
  if (c.workers < 0) throw UsageError("workers must be >= 0");
}

// ---- output assembly -----------------------------------------------------

io::json echo_config(const RunConfig& c) {
  io::json echo;
  echo["command"] = c.command;
  echo["b"] = c.b;
  echo["C"] = c.C;
  echo["lambda"] = io::json_number(c.lambda);
  echo["depth"] = c.depth;
  echo["bc"] = c.bc;
  echo["tol"] = io::json_number(c.numeric.tol);
  echo["gap_tol"] = io::json_number(c.numeric.gap_tol);
  echo["max_levels"] = c.numeric.max_levels;
  echo["format"] = c.output.format;
  echo["out"] = c.output.path;
  echo["seed"] = c.seed;
  echo["workers"] = c.workers;
  if (c.command == "fixpoints") {
    echo["map"] = c.map_name;
    echo["gamma"] = io::json_number(c.gamma);
    echo["kappa"] = io::json_number(c.kappa);
  }
  if (c.command == "critical") {
    echo["bracket"] = c.bracket;
    echo["bracket_tol"] = io::json_number(c.bracket_tol);
  }
  if (c.command == "order") {
    echo["lambda_cr"] = io::json_number(c.lambda_cr);
    io::json offs = io::json::array();
    for (double o : c.offsets) offs.push_back(io::json_number(o));
    echo["offsets"] = std::move(offs);
  }
  if (c.command == "scan") echo["grid"] = c.grid;
  if (c.command == "sample") {
    echo["sweeps"] = c.sweeps;
    echo["burn_in"] = c.burn_in;
  }
  if (c.command == "simulate") {
    echo["graph"] = c.graph;
    echo["events"] = c.events;
  }
  return echo;
}

struct CommandOutput {
  io::json result;
  io::json diagnostics = io::json::object();
  std::string csv;
  int exit_code = kExitOk;
};

CriticalityOptions crit_options(const RunConfig& c) {
  CriticalityOptions opts;
  opts.tol = c.numeric.tol;
  opts.gap_tol = c.numeric.gap_tol;
  opts.max_even_levels = c.numeric.max_levels;
  return opts;
}

CommandOutput run_exact(const RunConfig& c) {
  ModelParams params(c.b, c.C, c.lambda);
  TreeShape shape(c.b, c.depth);
  BoundaryCondition bc = parse_bc(c.bc, c.C);
  PartitionVector partition = dp_partition(shape, bc, params);
  RootLaw law = root_marginal(shape, bc, params);
  CommandOutput out;
  out.result["law"] = io::to_json(law);
  io::json logz = io::json::array();
  for (double v : partition.logZ) logz.push_back(io::json_number(v));
  out.result["logZ_rel"] = std::move(logz);
  out.diagnostics["vertices"] = shape.vertex_count();
  out.csv = io::partition_csv(law, partition);
  return out;
}

CommandOutput run_recurse(const RunConfig& c) {
  ModelParams params(c.b, c.C, c.lambda);
  BoundaryCondition bc = parse_bc(c.bc, c.C);
  IterateOptions opts;
  opts.tol = c.numeric.tol;
  opts.max_even_levels = c.numeric.max_levels;
  Trajectory trajectory = iterate(boundary_law(bc, params), params, opts);
  CommandOutput out;
  out.result = io::to_json(trajectory);
  out.diagnostics["levels"] = trajectory.levels;
  out.csv = io::trajectory_csv(trajectory);
  if (trajectory.status == IterStatus::MaxIterations)
    out.exit_code = kExitUndetermined;
  return out;
}

CommandOutput run_fixpoints(const RunConfig& c) {
  ScalarMap map = ScalarMap::j2_map(2, 1.0);
  if (c.map_name == "H") {
    map = ScalarMap::h_gamma(c.gamma);
  } else {
    ModelParams params(c.b, c.C, c.lambda);
    if (c.map_name == "J") {
      if (c.kappa >= 0) throw UsageError("kappa applies to the J2 map only");
      map = ScalarMap::j_map(params.b, params.lambda);
    } else {
      map = c.kappa >= 0 ? ScalarMap::damped_j2(params.b, params.lambda, c.kappa)
                         : ScalarMap::j2_map(params.b, params.lambda);
    }
  }
  FixedPointSet set = fixed_points(map);
  SShapeReport shape = verify_s_shape(map);
  CommandOutput out;
  out.result["fixed_points"] = io::to_json(set);
  out.result["s_shape"] = io::to_json(shape);
  out.diagnostics["sup_value"] = io::json_number(map.sup_value());
  out.csv = io::fixed_points_csv(set);
  return out;
}

CommandOutput run_critical(const RunConfig& c) {
  auto [lo, hi] = parse_pair(c.bracket, ',', "bracket");
  CriticalSearch search =
      find_lambda_cr(c.b, c.C, lo, hi, c.bracket_tol, crit_options(c));
  CommandOutput out;
  out.result = io::to_json(search);
  out.diagnostics["probe_count"] = search.probes.size();
  out.csv = io::critical_csv(search);
  if (!search.bracket_valid) out.exit_code = kExitUndetermined;
  return out;
}

CommandOutput run_scan(const RunConfig& c) {
  std::vector<double> lambdas = parse_grid(c.grid);
  std::vector<PhasePoint> points =
      scan_lambda_grid(c.b, c.C, lambdas, c.workers, crit_options(c));
  CommandOutput out;
  io::json rows = io::json::array();
  bool undetermined = false;
  long flips = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    rows.push_back(io::to_json(points[i]));
    undetermined = undetermined || points[i].undetermined;
    if (i > 0 && points[i].coexists != points[i - 1].coexists) ++flips;
  }
  out.result["points"] = std::move(rows);
  out.diagnostics["coexistence_flips"] = flips;
  out.csv = io::scan_csv(points);
  if (undetermined) out.exit_code = kExitUndetermined;
  return out;
}

CommandOutput run_order(const RunConfig& c) {
  OrderResult result =
      classify_order(c.b, c.C, c.lambda_cr, c.offsets, crit_options(c));
  CommandOutput out;
  out.result = io::to_json(result);
  out.csv = io::order_csv(result);
  if (result.order == TransitionOrder::Undetermined)
    out.exit_code = kExitUndetermined;
  return out;
}

CommandOutput run_window(const RunConfig& c) {
  WindowOptions opts;
  opts.crit = crit_options(c);
  WindowResult result = asymptotic_window(c.b, c.C, opts);
  CommandOutput out;
  out.result = io::to_json(result);
  out.csv = io::window_csv(result);
  for (const WindowProbe& p : result.probes)
    if (p.outcome.undetermined) out.exit_code = kExitUndetermined;
  return out;
}

CommandOutput run_sample(const RunConfig& c) {
  ModelParams params(c.b, c.C, c.lambda);
  TreeShape shape(c.b, c.depth);
  BoundaryCondition bc = parse_bc(c.bc, c.C);
  SampleResult result =
      sample_root_marginal(shape, params, bc, c.sweeps, c.burn_in, c.seed);
  CommandOutput out;
  out.result = io::to_json(result);
  // cross-check against the exact law whenever the tree is cheap to solve
  if (shape.vertex_count() <= (1u << 16)) {
    RootLaw exact = root_marginal(shape, bc, params);
    out.diagnostics["tv_vs_exact"] =
        io::json_number(tv_distance(result.law, exact));
  }
  out.csv = io::law_csv(result.law, result.std_error);
  return out;
}

CommandOutput run_simulate(const RunConfig& c) {
  ModelParams params(c.b, c.C, c.lambda);
  LossGraph graph = parse_graph(c.graph);
  LossStats stats = simulate_loss_network(graph, params, c.events, c.seed);
  CommandOutput out;
  out.result = io::to_json(stats, graph);
  std::vector<double> exact = loss_stationary_joint(graph, params);
  out.diagnostics["tv_vs_stationary"] =
      io::json_number(loss_joint_tv(stats, exact));
  out.csv = io::loss_csv(stats);
  return out;
}

CommandOutput dispatch(const RunConfig& c) {
  if (c.command == "exact") return run_exact(c);
  if (c.command == "recurse") return run_recurse(c);
  if (c.command == "fixpoints") return run_fixpoints(c);
  if (c.command == "critical") return run_critical(c);
  if (c.command == "scan") return run_scan(c);
  if (c.command == "order") return run_order(c);
  if (c.command == "window") return run_window(c);
  if (c.command == "sample") return run_sample(c);
  if (c.command == "simulate") return run_simulate(c);
  throw UsageError("unknown command: " + c.command);
}

}  // namespace

RunConfig parse_and_validate(const std::vector<std::string>& args) {
  Parsed parsed;
  build_app(&parsed);

  std::vector<std::string> final_args = args;
  std::string config_path = find_config_path(args);
  if (!config_path.empty()) {
    auto entries = read_config_file(config_path);
    std::vector<std::string> user_flags = explicit_flags(args);
    std::vector<std::string> injected;
    for (const auto& [key, value] : entries) {
      if (key == "config") continue;
      if (std::find(user_flags.begin(), user_flags.end(), key) !=
          user_flags.end()) {
        parsed.config.warnings.push_back("config value for '" + key +
                                         "' overridden by command-line flag");
        continue;
      }
      injected.push_back("--" + key);
      injected.push_back(value);
    }
    // injected defaults go right after the subcommand name
    if (final_args.empty())
      throw UsageError("a command is required; see --help");
    final_args.insert(final_args.begin() + 1, injected.begin(), injected.end());
  }

  std::reverse(final_args.begin(), final_args.end());  // CLI11 convention
  try {
    parsed.app.parse(final_args);
  } catch (const CLI::CallForHelp&) {
    auto subs = parsed.app.get_subcommands();
    throw HelpRequested{subs.empty() ? parsed.app.help() : subs[0]->help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  for (CLI::App* cmd : parsed.commands)
    if (cmd->parsed()) parsed.config.command = cmd->get_name();
  validate(parsed.config);
  return parsed.config;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  CommandOutput result = dispatch(config);
  for (const std::string& w : config.warnings) err << "warning: " << w << "\n";

  std::string payload;
  if (config.output.format == "csv") {
    payload = result.csv;
  } else {
    io::json doc;
    doc["schema_version"] = "hardcore-tree/v1";
    doc["config_echo"] = echo_config(config);
    doc["result"] = std::move(result.result);
    if (!config.warnings.empty()) {
      io::json warn = io::json::array();
      for (const std::string& w : config.warnings) warn.push_back(w);
      result.diagnostics["warnings"] = std::move(warn);
    }
    result.diagnostics["exit_code"] = result.exit_code;
    doc["diagnostics"] = std::move(result.diagnostics);
    payload = doc.dump(2);
    payload.push_back('\n');
  }

  if (config.output.path.empty()) {
    out << payload;
  } else {
    std::ofstream file(config.output.path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output path: " +
                                        config.output.path);
    file << payload;
  }
  return result.exit_code;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    RunConfig config = parse_and_validate(args);
    return run(config, std::cout, std::cerr);
  } catch (const HelpRequested& help) {
    std::cout << help.text;
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace hardcore::cli
