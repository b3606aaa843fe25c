#include "drlcp/milp/io.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace drlcp::milp {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

char row_type(Sense s) {
  switch (s) {
    case Sense::LessEqual: return 'L';
    case Sense::Equal: return 'E';
    case Sense::GreaterEqual: return 'G';
  }
  return 'L';
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

std::string to_mps(const MilpModel& model) {
  model.validate();
  std::ostringstream os;
  os << "NAME " << model.name << "\n";
  os << "ROWS\n";
  os << " N OBJ\n";
  for (const auto& r : model.rows) os << " " << row_type(r.sense) << " " << r.name << "\n";

  // column-major coefficient lists
  std::vector<std::vector<std::pair<std::string, double>>> cols(
      static_cast<std::size_t>(model.num_vars()));
  for (const auto& [id, c] : model.objective)
    cols[static_cast<std::size_t>(id)].emplace_back("OBJ", c);
  for (const auto& r : model.rows)
    for (const auto& [id, c] : r.coeffs)
      cols[static_cast<std::size_t>(id)].emplace_back(r.name, c);

  os << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < model.num_vars(); ++j) {
    const auto& v = model.vars[static_cast<std::size_t>(j)];
    bool want_int = v.kind == VarKind::Integer;
    if (want_int != in_int) {
      os << "    MARKER" << marker++ << " 'MARKER' '" << (want_int ? "INTORG" : "INTEND")
         << "'\n";
      in_int = want_int;
    }
    const auto& entries = cols[static_cast<std::size_t>(j)];
    if (entries.empty()) {
      os << "    " << v.name << " OBJ 0\n";  // keep every column present
      continue;
    }
    for (const auto& [row, c] : entries) os << "    " << v.name << " " << row << " " << num(c) << "\n";
  }
  if (in_int) os << "    MARKER" << marker++ << " 'MARKER' 'INTEND'\n";

  os << "RHS\n";
  if (model.objective_constant != 0.0)
    os << "    RHS OBJ " << num(-model.objective_constant) << "\n";
  for (const auto& r : model.rows)
    if (r.rhs != 0.0) os << "    RHS " << r.name << " " << num(r.rhs) << "\n";

  os << "BOUNDS\n";
  for (const auto& v : model.vars) {
    bool lo_fin = std::isfinite(v.lower), hi_fin = std::isfinite(v.upper);
    if (lo_fin && hi_fin && v.lower == v.upper) {
      os << " FX BND " << v.name << " " << num(v.lower) << "\n";
      continue;
    }
    if (!lo_fin && !hi_fin) {
      os << " FR BND " << v.name << "\n";
      continue;
    }
    if (lo_fin)
      os << " LO BND " << v.name << " " << num(v.lower) << "\n";
    else
      os << " MI BND " << v.name << "\n";
    if (hi_fin) os << " UP BND " << v.name << " " << num(v.upper) << "\n";
  }
  os << "ENDATA\n";
  return os.str();
}

void write_mps(const MilpModel& model, const std::string& path) {
  write_file(path, to_mps(model));
}

std::string to_lp(const MilpModel& model) {
  model.validate();
  std::ostringstream os;
  os << "\\ " << model.name << "\nMinimize\n obj:";
  for (const auto& [id, c] : model.objective)
    os << (c >= 0 ? " + " : " - ") << num(std::abs(c)) << " "
       << model.vars[static_cast<std::size_t>(id)].name;
  if (model.objective_constant != 0.0)
    os << (model.objective_constant >= 0 ? " + " : " - ")
       << num(std::abs(model.objective_constant));
  os << "\nSubject To\n";
  for (const auto& r : model.rows) {
    os << " " << r.name << ":";
    for (const auto& [id, c] : r.coeffs)
      os << (c >= 0 ? " + " : " - ") << num(std::abs(c)) << " "
         << model.vars[static_cast<std::size_t>(id)].name;
    const char* op = r.sense == Sense::LessEqual ? "<=" : r.sense == Sense::Equal ? "=" : ">=";
    os << " " << op << " " << num(r.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : model.vars) {
    std::string lo = std::isfinite(v.lower) ? num(v.lower) : "-inf";
    std::string hi = std::isfinite(v.upper) ? num(v.upper) : "+inf";
    os << " " << lo << " <= " << v.name << " <= " << hi << "\n";
  }
  bool any_int = false;
  for (const auto& v : model.vars)
    if (v.kind == VarKind::Integer) {
      if (!any_int) os << "Generals\n";
      any_int = true;
      os << " " << v.name << "\n";
    }
  os << "End\n";
  return os.str();
}

void write_lp(const MilpModel& model, const std::string& path) {
  write_file(path, to_lp(model));
}

SolveResult solve_with_external(const MilpModel& model, const std::string& command,
                                const std::string& work_dir) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned long> counter{0};
  fs::path dir = work_dir.empty() ? fs::temp_directory_path() : fs::path(work_dir);
  fs::create_directories(dir);
  unsigned long uid = counter.fetch_add(1);
  fs::path mps = dir / ("ext_" + std::to_string(::getpid()) + "_" + std::to_string(uid) + ".mps");
  fs::path sol = dir / ("ext_" + std::to_string(::getpid()) + "_" + std::to_string(uid) + ".sol");

  const auto t_start = std::chrono::steady_clock::now();
  write_mps(model, mps.string());
  std::string cmdline = command + " " + mps.string() + " " + sol.string();
  int rc = std::system(cmdline.c_str());

  SolveResult res;
  res.status = SolveStatus::Infeasible;
  std::ifstream in(sol);
  if (rc != 0 || !in) {
    fs::remove(mps);
    fs::remove(sol);
    throw IoError("external solver failed: " + cmdline);
  }
  std::map<std::string, double> values;
  std::string status_word = "infeasible";
  std::string name;
  std::string value;
  while (in >> name >> value) {
    if (name == "__status__")
      status_word = value;
    else if (name == "__objective__")
      continue;  // recomputed below
    else
      values[name] = std::stod(value);
  }
  in.close();
  fs::remove(mps);
  fs::remove(sol);

  if (status_word == "optimal")
    res.status = SolveStatus::Optimal;
  else if (status_word == "unbounded")
    res.status = SolveStatus::Unbounded;
  else if (status_word == "time_limit")
    res.status = SolveStatus::TimeLimit;
  else if (status_word == "node_limit")
    res.status = SolveStatus::NodeLimit;
  else
    res.status = SolveStatus::Infeasible;

  if (res.status == SolveStatus::Optimal || res.status == SolveStatus::TimeLimit ||
      res.status == SolveStatus::NodeLimit) {
    res.x.assign(static_cast<std::size_t>(model.num_vars()), 0.0);
    for (int j = 0; j < model.num_vars(); ++j) {
      auto it = values.find(model.vars[static_cast<std::size_t>(j)].name);
      if (it != values.end()) res.x[static_cast<std::size_t>(j)] = it->second;
    }
    for (int j = 0; j < model.num_vars(); ++j)
      if (model.vars[static_cast<std::size_t>(j)].kind == VarKind::Integer)
        res.x[static_cast<std::size_t>(j)] = std::round(res.x[static_cast<std::size_t>(j)]);
    res.objective = model.objective_constant;
    for (const auto& [id, c] : model.objective)
      res.objective += c * res.x[static_cast<std::size_t>(id)];
    res.bound = res.objective;
    res.gap = 0.0;
  }
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

}  // namespace drlcp::milp
