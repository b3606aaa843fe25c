#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "drlcp/inventory.hpp"
#include "drlcp/milp/io.hpp"
#include "drlcp/milp/solver.hpp"
#include "drlcp/oracle.hpp"
#include "drlcp/reformulation.hpp"

using json = nlohmann::json;
using namespace drlcp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitLimit = 4;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

std::vector<Eigen::MatrixXd> parse_stage_matrices(const json& j, const std::string& key,
                                                  int stages, const std::string& where) {
  auto raw = require<std::vector<std::vector<std::vector<double>>>>(j, key, where);
  if (static_cast<int>(raw.size()) != stages)
    throw ConfigError(where + "." + key + ": expected one matrix per stage");
  std::vector<Eigen::MatrixXd> out;
  for (const auto& m : raw) {
    if (m.empty()) throw ConfigError(where + "." + key + ": empty matrix");
    Eigen::MatrixXd mat(m.size(), m[0].size());
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (m[r].size() != m[0].size())
        throw ConfigError(where + "." + key + ": ragged matrix");
      for (std::size_t c = 0; c < m[r].size(); ++c)
        mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m[r][c];
    }
    out.push_back(std::move(mat));
  }
  return out;
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

struct LoadedProblem {
  SystemModel model;
  LiftingSpec lifting;
  InformationMask mask;
  CompiledProblem compiled;
  std::optional<InventorySpec> inventory;
};

LoadedProblem load_model(const json& cfg, std::optional<std::uint64_t> seed_override) {
  if (!cfg.contains("model")) throw ConfigError("config: missing 'model' block");
  const json& m = cfg.at("model");
  const std::string preset = get_or<std::string>(m, "preset", "explicit");
  LoadedProblem out;

  if (preset == "inventory") {
    InventorySpec spec;
    spec.horizon = get_or(m, "horizon", spec.horizon);
    spec.num_lots = get_or(m, "num_lots", spec.num_lots);
    spec.holding = get_or(m, "holding", spec.holding);
    spec.booking = get_or(m, "booking", spec.booking);
    spec.lot_price = get_or(m, "lot_price", spec.lot_price);
    spec.lot_size = get_or(m, "lot_size", spec.lot_size);
    if (m.contains("support")) {
      auto s = m.at("support").get<std::vector<double>>();
      if (s.size() != 2) throw ConfigError("model.support: expected [lower, upper]");
      spec.support_lo = s[0];
      spec.support_hi = s[1];
    }
    spec.x0 = get_or(m, "x0", spec.x0);
    spec.segments = get_or(m, "segments", spec.segments);
    spec.num_samples = get_or(m, "num_samples", spec.num_samples);
    spec.radius = get_or(m, "radius", spec.radius);
    spec.sigma = get_or(m, "sigma", spec.sigma);
    spec.mean = get_or(m, "mean", spec.mean);
    spec.sample_seed = get_or(m, "sample_seed", spec.sample_seed);
    if (seed_override) spec.sample_seed = *seed_override;
    if (cfg.contains("lifting"))
      spec.segments = get_or(cfg.at("lifting"), "segments", spec.segments);
    InventoryProblem prob = build_inventory(spec);
    out.model = std::move(prob.model);
    out.lifting = std::move(prob.lifting);
    out.mask = std::move(prob.mask);
    out.compiled = std::move(prob.compiled);
    out.inventory = prob.spec;
    return out;
  }
  if (preset != "explicit")
    throw ConfigError("model.preset: expected 'inventory' or 'explicit'");

  SystemModel& sys = out.model;
  sys.horizon = require<int>(m, "horizon", "model");
  sys.n_x = require<int>(m, "n_x", "model");
  sys.n_u = require<int>(m, "n_u", "model");
  sys.n_gamma = require<int>(m, "n_gamma", "model");
  sys.space.horizon = sys.horizon;
  auto slo = require<std::vector<std::vector<double>>>(m, "support_lower", "model");
  auto shi = require<std::vector<std::vector<double>>>(m, "support_upper", "model");
  if (slo.empty() || slo.size() != shi.size())
    throw ConfigError("model: support bound shapes differ");
  sys.space.dims_per_stage = static_cast<int>(slo[0].size());
  sys.space.lower = slo;
  sys.space.upper = shi;
  sys.A = parse_stage_matrices(m, "A", sys.horizon, "model");
  sys.B = parse_stage_matrices(m, "B", sys.horizon, "model");
  sys.C = parse_stage_matrices(m, "C", sys.horizon, "model");
  sys.D = parse_stage_matrices(m, "D", sys.horizon, "model");
  auto q = get_or(m, "q", std::vector<double>{});
  sys.q = to_vec(q);
  if (q.empty()) {
    const auto zero = [&](int cols) {
      return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(sys.horizon),
                                          Eigen::MatrixXd::Zero(0, cols));
    };
    sys.Ac = zero(sys.n_x);
    sys.Bc = zero(sys.n_u);
    sys.Cc = zero(sys.n_gamma);
    sys.Dc = zero(sys.space.dims_per_stage);
  } else {
    sys.Ac = parse_stage_matrices(m, "Ac", sys.horizon, "model");
    sys.Bc = parse_stage_matrices(m, "Bc", sys.horizon, "model");
    sys.Cc = parse_stage_matrices(m, "Cc", sys.horizon, "model");
    sys.Dc = parse_stage_matrices(m, "Dc", sys.horizon, "model");
  }
  sys.x0 = to_vec(require<std::vector<double>>(m, "x0", "model"));
  sys.discount = get_or(m, "discount",
                        std::vector<double>(static_cast<std::size_t>(sys.horizon), 1.0));
  if (!m.contains("cost_pieces")) throw ConfigError("model: missing 'cost_pieces'");
  for (const auto& stage : m.at("cost_pieces")) {
    std::vector<StageCostPiece> pieces;
    for (const auto& pj : stage) {
      StageCostPiece pc;
      pc.a = to_vec(require<std::vector<double>>(pj, "a", "cost piece"));
      pc.b = to_vec(require<std::vector<double>>(pj, "b", "cost piece"));
      pc.c = to_vec(require<std::vector<double>>(pj, "c", "cost piece"));
      pieces.push_back(std::move(pc));
    }
    sys.cost_pieces.push_back(std::move(pieces));
  }

  if (cfg.contains("lifting") && cfg.at("lifting").contains("grid")) {
    out.lifting.grid =
        cfg.at("lifting").at("grid").get<std::vector<std::vector<std::vector<double>>>>();
  } else {
    const int p = cfg.contains("lifting")
                      ? get_or(cfg.at("lifting"), "segments", 1)
                      : 1;
    out.lifting = LiftingSpec::equal_division(sys.space, p);
  }

  out.mask = InformationMask::full(sys);
  const int u_lag = cfg.contains("mask") ? get_or(cfg.at("mask"), "u_lag", 0) : 0;
  if (u_lag > 0) out.mask.set_u_lag(u_lag);
  try {
    out.compiled = compile(sys, out.lifting, out.mask);
  } catch (const ShapeMismatch& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  return out;
}

std::vector<std::vector<double>> load_sample_block(const json& a, const DisturbanceSpace& space,
                                                   const std::string& where) {
  if (a.contains("samples_file"))
    return load_samples(a.at("samples_file").get<std::string>(), space);
  if (a.contains("samples")) {
    auto raw = a.at("samples").get<std::vector<std::vector<double>>>();
    WassersteinSet probe{0.0, raw};
    probe.validate(space);
    return raw;
  }
  throw ConfigError(where + ": needs 'samples' or 'samples_file'");
}

PolicyBounds load_bounds(const json& cfg, const LoadedProblem& prob) {
  PolicyBounds b = prob.inventory ? inventory_policy_bounds() : PolicyBounds{};
  if (!cfg.contains("policy_bounds")) return b;
  const json& j = cfg.at("policy_bounds");
  b.y_abs = get_or(j, "y_abs", b.y_abs);
  b.z_lower = get_or(j, "z_lower", b.z_lower);
  b.z_upper = get_or(j, "z_upper", b.z_upper);
  b.z0_lower = get_or(j, "z0_lower", b.z0_lower);
  b.z0_upper = get_or(j, "z0_upper", b.z0_upper);
  return b;
}

struct BuiltFromConfig {
  milp::MilpModel model;
  std::vector<BuildInfo> infos;  // one per scenario (one entry unless event-wise)
  std::string kind;
  // oracle inputs
  LoadedProblem prob;
  WassersteinSet wset;
  MixedMomentSet mset;
  EventWiseSet eset;
};

BuiltFromConfig build_from_config(const json& cfg, std::optional<std::uint64_t> seed) {
  BuiltFromConfig out;
  out.prob = load_model(cfg, seed);
  ReformulationOptions ropts;
  ropts.policy_bounds = load_bounds(cfg, out.prob);

  json amb = cfg.contains("ambiguity") ? cfg.at("ambiguity") : json::object();
  out.kind = get_or<std::string>(amb, "type", "wasserstein");

  if (out.kind == "wasserstein") {
    if (out.prob.inventory && !amb.contains("samples") && !amb.contains("samples_file")) {
      out.wset.samples = sample_demands(*out.prob.inventory, out.prob.inventory->num_samples,
                                        out.prob.inventory->sample_seed);
      out.wset.radius = get_or(amb, "radius", out.prob.inventory->radius);
    } else {
      out.wset.radius = require<double>(amb, "radius", "ambiguity");
      out.wset.samples = load_sample_block(amb, out.prob.model.space, "ambiguity");
    }
    BuiltModel b = build_wasserstein(out.prob.compiled, out.wset, ropts);
    out.model = std::move(b.model);
    out.infos = {b.info};
  } else if (out.kind == "mixed_moment") {
    out.mset.base.radius = require<double>(amb, "radius", "ambiguity");
    out.mset.base.samples = load_sample_block(amb, out.prob.model.space, "ambiguity");
    out.mset.mean_lower = require<std::vector<double>>(amb, "mean_lower", "ambiguity");
    out.mset.mean_upper = require<std::vector<double>>(amb, "mean_upper", "ambiguity");
    BuiltModel b = build_mixed_moment(out.prob.compiled, out.mset, ropts);
    out.model = std::move(b.model);
    out.infos = {b.info};
  } else if (out.kind == "event_wise") {
    if (!amb.contains("events")) throw ConfigError("ambiguity: event_wise needs 'events'");
    std::vector<CompiledProblem> problems;
    for (const auto& ev : amb.at("events")) {
      out.eset.probabilities.push_back(require<double>(ev, "probability", "event"));
      WassersteinSet w;
      w.radius = require<double>(ev, "radius", "event");
      w.samples = load_sample_block(ev, out.prob.model.space, "event");
      out.eset.events.push_back(std::move(w));
      problems.push_back(out.prob.compiled);  // events share the support here
    }
    EventWiseBuilt b = build_event_wise(problems, out.eset, ropts);
    out.model = std::move(b.model);
    out.infos = std::move(b.events);
  } else {
    throw ConfigError("ambiguity.type: unknown '" + out.kind + "'");
  }
  return out;
}

SolverChoice load_solver(const json& cfg) {
  SolverChoice choice;
  if (!cfg.contains("solver")) return choice;
  const json& s = cfg.at("solver");
  choice.options.gap = get_or(s, "gap", choice.options.gap);
  choice.options.node_limit = get_or(s, "node_limit", choice.options.node_limit);
  choice.options.time_limit_s = get_or(s, "time_limit_s", choice.options.time_limit_s);
  choice.external_command = get_or<std::string>(s, "external_command", "");
  choice.work_dir = get_or<std::string>(s, "work_dir", "");
  return choice;
}

int status_exit_code(milp::SolveStatus s) {
  switch (s) {
    case milp::SolveStatus::Optimal:
    case milp::SolveStatus::GapLimit:
      return kExitOk;
    case milp::SolveStatus::Infeasible:
    case milp::SolveStatus::Unbounded:
      return kExitInfeasible;
    default:
      return kExitLimit;
  }
}

void write_policy_file(const std::string& path, const BuiltFromConfig& built,
                       const milp::SolveResult& res) {
  json out;
  out["objective"] = res.objective;
  json scen = json::array();
  for (const auto& info : built.infos) {
    const auto values = extract_policy(res.x, info);
    json pol = json::object();
    for (int v = 0; v < info.num_policy_vars; ++v)
      pol[built.prob.compiled.layout.names[static_cast<std::size_t>(v)]] =
          values[static_cast<std::size_t>(v)];
    scen.push_back(pol);
  }
  if (scen.size() == 1)
    out["policy"] = scen[0];
  else
    out["events"] = scen;
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << out.dump(2) << "\n";
}

std::vector<double> read_policy_file(const std::string& path, const PolicyLayout& layout) {
  json j = load_json(path);
  if (!j.contains("policy")) throw ConfigError(path + ": missing 'policy' object");
  std::vector<double> values(static_cast<std::size_t>(layout.num_vars), 0.0);
  for (int v = 0; v < layout.num_vars; ++v) {
    const auto& name = layout.names[static_cast<std::size_t>(v)];
    if (!j.at("policy").contains(name))
      throw ConfigError(path + ": policy is missing entry '" + name + "'");
    values[static_cast<std::size_t>(v)] = j.at("policy").at(name).get<double>();
  }
  return values;
}

double oracle_value(const BuiltFromConfig& built, const std::vector<double>& policy) {
  oracle::ScenarioData data;
  data.pieces = substitute_cost(built.prob.compiled.cost, policy);
  data.geo = segment_endpoints(built.prob.model.space, built.prob.lifting);
  data.index = built.prob.compiled.index;
  if (built.kind == "wasserstein") {
    data.samples = built.wset.samples;
    data.radius = built.wset.radius;
    return oracle::worst_case_expectation(data).value;
  }
  if (built.kind == "mixed_moment") {
    data.samples = built.mset.base.samples;
    data.radius = built.mset.base.radius;
    return oracle::check_mixed_moment(data, built.mset.mean_lower, built.mset.mean_upper).value;
  }
  throw ConfigError("certify: supported for wasserstein and mixed_moment ambiguity");
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<std::vector<double>> read_raw_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(path + ": line " + std::to_string(lineno) + ": bad value '" + cell +
                         "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path + ": no samples");
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributionally robust lifted-policy control toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_mps, out_lp = "", policy_path = "policy.json";
  std::string certify_policy, out_dir = ".";
  std::string radius_a, radius_b;
  std::string horizons_csv = "4", segments_csv = "2";
  int sims = 100;
  int threads = 1;
  bool closed_loop = false;
  std::optional<std::uint64_t> seed;
  std::uint64_t seed_raw = 0;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed_raw, "override every random seed")
        ->each([&](const std::string&) { seed = seed_raw; });
  };

  CLI::App* cmd_build = app.add_subcommand("build", "build a model and export it unsolved");
  cmd_build->add_option("-c,--config", config_path, "run configuration")->required();
  cmd_build->add_option("-o,--out", out_mps, "output MPS path")->required();
  cmd_build->add_option("--lp", out_lp, "also export LP format to this path");
  add_seed(cmd_build);

  CLI::App* cmd_solve = app.add_subcommand("solve", "build and solve, write the policy");
  cmd_solve->add_option("-c,--config", config_path, "run configuration")->required();
  cmd_solve->add_option("--policy", policy_path, "policy output path");
  cmd_solve->add_option("--threads", threads, "worker threads (only 1 supported)");
  add_seed(cmd_solve);

  CLI::App* cmd_certify = app.add_subcommand("certify", "oracle cross-check of a policy");
  cmd_certify->add_option("-c,--config", config_path, "run configuration")->required();
  cmd_certify->add_option("--policy", certify_policy, "policy file to certify")->required();
  add_seed(cmd_certify);

  CLI::App* cmd_bench = app.add_subcommand("bench", "inventory benchmark sweeps");
  cmd_bench->add_option("-c,--config", config_path, "run configuration (inventory preset)");
  cmd_bench->add_option("--horizons", horizons_csv, "comma-separated horizon list");
  cmd_bench->add_option("--segments", segments_csv, "comma-separated segment counts");
  cmd_bench->add_option("--sims", sims, "closed-loop simulation count");
  cmd_bench->add_flag("--closed-loop", closed_loop, "also run the closed-loop protocol");
  cmd_bench->add_option("--out", out_dir, "output directory for CSV reports");
  cmd_bench->add_option("--threads", threads, "worker threads (only 1 supported)");
  add_seed(cmd_bench);

  CLI::App* cmd_radius = app.add_subcommand("radius", "Wasserstein distance of two CSV sets");
  cmd_radius->add_option("a", radius_a, "first sample CSV")->required();
  cmd_radius->add_option("b", radius_b, "second sample CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads != 1)
      std::fprintf(stderr, "note: --threads %d requested, running single-threaded\n", threads);

    if (*cmd_build) {
      json cfg = load_json(config_path);
      BuiltFromConfig built = build_from_config(cfg, seed);
      milp::write_mps(built.model, out_mps);
      if (!out_lp.empty()) milp::write_lp(built.model, out_lp);
      std::printf("wrote %s (%d vars, %d rows, %d integer)\n", out_mps.c_str(),
                  built.model.num_vars(), built.model.num_rows(),
                  built.model.num_integer_vars());
      return kExitOk;
    }

    if (*cmd_solve) {
      json cfg = load_json(config_path);
      BuiltFromConfig built = build_from_config(cfg, seed);
      SolverChoice choice = load_solver(cfg);
      milp::SolveResult res = solve_built(built.model, choice);
      std::printf("status    %s\n", milp::to_string(res.status).c_str());
      if (res.has_solution()) {
        std::printf("objective %.10g\nbound     %.10g\ngap       %.4g\n", res.objective,
                    res.bound, res.gap);
        write_policy_file(policy_path, built, res);
        std::printf("policy    %s\n", policy_path.c_str());
      }
      std::printf("nodes     %ld\ntime_s    %.3f\n", res.nodes, res.wall_time_s);
      return status_exit_code(res.status);
    }

    if (*cmd_certify) {
      json cfg = load_json(config_path);
      BuiltFromConfig built = build_from_config(cfg, seed);
      const auto policy = read_policy_file(certify_policy, built.prob.compiled.layout);
      milp::MilpModel fixed = built.model;
      for (int v = 0; v < built.infos[0].num_policy_vars; ++v)
        fixed.fix_var(built.infos[0].policy_offset + v, policy[static_cast<std::size_t>(v)]);
      SolverChoice choice = load_solver(cfg);
      milp::SolveResult res = solve_built(fixed, choice);
      if (!res.has_solution()) {
        std::printf("reformulation: %s\n", milp::to_string(res.status).c_str());
        return kExitInfeasible;
      }
      const double reformulated = res.objective;
      const double certified = oracle_value(built, policy);
      std::printf("reformulated %.10g\noracle       %.10g\ndifference   %.3g\n", reformulated,
                  certified, reformulated - certified);
      return kExitOk;
    }

    if (*cmd_bench) {
      InventorySpec base;
      SolverChoice choice;
      if (!config_path.empty()) {
        json cfg = load_json(config_path);
        LoadedProblem prob = load_model(cfg, seed);
        if (!prob.inventory) throw ConfigError("bench: config must use the inventory preset");
        base = *prob.inventory;
        choice = load_solver(cfg);
      } else if (seed) {
        base.sample_seed = *seed;
      }
      std::vector<OpenLoopResult> rows;
      for (int T : parse_int_list(horizons_csv))
        for (int p : parse_int_list(segments_csv)) {
          InventorySpec spec = base;
          spec.horizon = T;
          spec.segments = p;
          spec.mean.clear();
          OpenLoopResult r = run_open_loop(spec, choice);
          std::printf("T=%d p=%d status=%s objective=%.6f time=%.2fs\n", T, p,
                      r.status.c_str(), r.objective, r.time_s);
          rows.push_back(std::move(r));
        }
      write_open_loop_csv(out_dir + "/open_loop.csv", rows);
      std::printf("wrote %s/open_loop.csv\n", out_dir.c_str());
      if (closed_loop) {
        for (int p : parse_int_list(segments_csv)) {
          InventorySpec spec = base;
          spec.horizon = parse_int_list(horizons_csv).front();
          spec.segments = p;
          spec.mean.clear();
          ClosedLoopSummary summary =
              run_closed_loop(spec, sims, choice, seed.value_or(base.sample_seed + 1));
          const std::string path =
              out_dir + "/closed_loop_p" + std::to_string(p) + ".csv";
          write_closed_loop_csv(path, summary);
          std::printf("p=%d mean_cost=%.4f stddev=%.4f -> %s\n", p, summary.mean_cost,
                      summary.stddev_cost, path.c_str());
        }
      }
      return kExitOk;
    }

    if (*cmd_radius) {
      const auto a = read_raw_csv(radius_a);
      const auto b = read_raw_csv(radius_b);
      std::printf("%.12g\n", estimate_radius(a, b));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const OutOfSupport& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  }
  return kExitOk;
}
