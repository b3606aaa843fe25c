#include "drlcp/ambiguity.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "drlcp/milp/solver.hpp"

namespace drlcp {

void WassersteinSet::validate(const DisturbanceSpace& space) const {
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw ShapeMismatch("ambiguity: radius must be finite and nonnegative");
  if (samples.empty()) throw ShapeMismatch("ambiguity: sample set is empty");
  const std::size_t dim = static_cast<std::size_t>(space.total_dim());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (samples[s].size() != dim)
      throw ShapeMismatch("ambiguity: sample " + std::to_string(s) + " has length " +
                          std::to_string(samples[s].size()) + ", expected " +
                          std::to_string(dim));
    if (!space.contains(samples[s]))
      throw OutOfSupport("ambiguity: sample " + std::to_string(s) + " leaves the support");
  }
}

void MixedMomentSet::validate(const DisturbanceSpace& space) const {
  base.validate(space);
  const std::size_t dim = static_cast<std::size_t>(space.total_dim());
  if (mean_lower.size() != dim || mean_upper.size() != dim)
    throw ShapeMismatch("ambiguity: mean bound length differs from the support dimension");
  for (std::size_t k = 0; k < dim; ++k) {
    if (!std::isfinite(mean_lower[k]) || !std::isfinite(mean_upper[k]))
      throw ShapeMismatch("ambiguity: mean bounds must be finite");
    if (mean_lower[k] > mean_upper[k])
      throw ShapeMismatch("ambiguity: crossed mean bounds at component " + std::to_string(k));
  }
}

void EventWiseSet::validate(const std::vector<DisturbanceSpace>& supports) const {
  if (events.empty()) throw ShapeMismatch("ambiguity: no events");
  if (probabilities.size() != events.size() || supports.size() != events.size())
    throw ShapeMismatch("ambiguity: event count mismatch");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw ShapeMismatch("ambiguity: event probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ShapeMismatch("ambiguity: event probabilities sum to " + std::to_string(total));
  for (std::size_t l = 0; l < events.size(); ++l) events[l].validate(supports[l]);
}

std::vector<std::vector<double>> parse_samples(const std::string& text,
                                               const DisturbanceSpace& space) {
  const std::size_t dim = static_cast<std::size_t>(space.total_dim());
  std::vector<std::vector<double>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        while (used < cell.size() &&
               (cell[used] == ' ' || cell[used] == '\t' || cell[used] == '\r'))
          ++used;
        if (used != cell.size()) throw std::invalid_argument("trailing characters");
        row.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("samples: line " + std::to_string(lineno) + ", column " +
                         std::to_string(row.size() + 1) + ": cannot parse '" + cell + "'");
      }
    }
    if (row.size() != dim)
      throw ParseError("samples: line " + std::to_string(lineno) + " has " +
                       std::to_string(row.size()) + " values, expected " +
                       std::to_string(dim));
    if (!space.contains(row)) {
      std::size_t bad = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        const int t = static_cast<int>(k) / space.dims_per_stage;
        const int i = static_cast<int>(k) % space.dims_per_stage;
        const double lo = space.lower[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
        const double hi = space.upper[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
        if (row[k] < lo - 1e-12 || row[k] > hi + 1e-12) {
          bad = k;
          break;
        }
      }
      throw OutOfSupport("samples: line " + std::to_string(lineno) + ", column " +
                         std::to_string(bad + 1) + " leaves the support");
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::vector<double>> load_samples(const std::string& path,
                                              const DisturbanceSpace& space) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sample file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_samples(buf.str(), space);
}

double estimate_radius(const std::vector<std::vector<double>>& a,
                       const std::vector<std::vector<double>>& b) {
  if (a.empty() || b.empty()) throw ShapeMismatch("estimate_radius: empty sample set");
  const std::size_t dim = a[0].size();
  for (const auto& s : a)
    if (s.size() != dim) throw ShapeMismatch("estimate_radius: ragged sample set");
  for (const auto& s : b)
    if (s.size() != dim) throw ShapeMismatch("estimate_radius: ragged sample set");

  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());

  milp::MilpModel model;
  model.name = "transport";
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      model.add_var("x_" + std::to_string(i) + "_" + std::to_string(j), 0.0, 1.0);

  for (int i = 0; i < na; ++i) {
    std::vector<std::pair<int, double>> coeffs;
    for (int j = 0; j < nb; ++j) coeffs.emplace_back(i * nb + j, 1.0);
    model.add_row("src_" + std::to_string(i), std::move(coeffs), milp::Sense::Equal,
                  1.0 / na);
  }
  for (int j = 0; j < nb; ++j) {
    std::vector<std::pair<int, double>> coeffs;
    for (int i = 0; i < na; ++i) coeffs.emplace_back(i * nb + j, 1.0);
    model.add_row("dst_" + std::to_string(j), std::move(coeffs), milp::Sense::Equal,
                  1.0 / nb);
  }
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      double cost = 0.0;
      for (std::size_t k = 0; k < dim; ++k) cost += std::abs(a[i][k] - b[j][k]);
      if (cost != 0.0) model.add_objective_term(i * nb + j, cost);
    }

  milp::SolveOptions opts;
  auto res = milp::solve_milp(model, opts);
  if (res.status != milp::SolveStatus::Optimal)
    throw NumericalFailure("estimate_radius: transportation LP not solved to optimality");
  return res.objective;
}

}  // namespace drlcp
