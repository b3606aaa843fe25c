#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "drlcp/affine.hpp"
#include "drlcp/lifting.hpp"
#include "drlcp/milp/model.hpp"

namespace drlcp {

/// One affine piece a'x + b'u + c'g of a max-of-affine stage cost.
struct StageCostPiece {
  Eigen::VectorXd a;  // n_x
  Eigen::VectorXd b;  // n_u
  Eigen::VectorXd c;  // n_gamma
};

/// Uncertain linear system over stages t = 1..T (stored 0-based):
///   x_t = A[t] x_{t-1} + B[t] u_t + C[t] g_t + D[t] xi_t
/// with coupled robust rows
///   sum_t Ac[t] x_t + Bc[t] u_t + Cc[t] g_t + Dc[t] xi_t <= q  for all xi,
/// and stage cost discount[t] * max-of-pieces at (x_t, u_t, g_t).
struct SystemModel {
  int horizon = 0;
  int n_x = 0;
  int n_u = 0;
  int n_gamma = 0;
  DisturbanceSpace space;
  std::vector<Eigen::MatrixXd> A, B, C, D;
  std::vector<Eigen::MatrixXd> Ac, Bc, Cc, Dc;
  Eigen::VectorXd q;
  Eigen::VectorXd x0;
  std::vector<double> discount;                        // alpha_t in [0, 1]
  std::vector<std::vector<StageCostPiece>> cost_pieces;  // [t][piece]

  int n_constraints() const { return static_cast<int>(q.size()); }
  void validate() const;
};

/// Which lifted blocks each control channel may read: continuous channels
/// read V-blocks, integer channels read Q-blocks. Causality (t' <= t) is the
/// widest allowed pattern; masking a block fixes its gain columns to zero
/// structurally.
struct InformationMask {
  // allow_u[t][ch][t'][i], with t' <= t; likewise allow_gamma.
  std::vector<std::vector<std::vector<std::vector<char>>>> allow_u;
  std::vector<std::vector<std::vector<std::vector<char>>>> allow_gamma;

  static InformationMask full(const SystemModel& model);
  /// Restricts every continuous channel at stage t to blocks of stages
  /// t' <= t - lag (lag = 1: controls decided before the stage's disturbance
  /// realizes).
  void set_u_lag(int lag);
  /// Removes one block stage from every channel of both control kinds.
  void block_stage_everywhere(int t_prime);
};

/// Deterministic flat numbering of the policy decision data. Per stage:
/// continuous gain entries, continuous offsets, integer gain entries,
/// integer offsets. Gain entries are absent where the mask forbids them.
struct PolicyLayout {
  struct GainRef {
    int t_prime;  // block stage
    int i;        // block dimension
    int j;        // entry within the block (V entry or Q entry)
    int var;      // flat variable id
  };
  int horizon = 0;
  int n_u = 0;
  int n_gamma = 0;
  int num_vars = 0;
  std::vector<std::vector<std::vector<GainRef>>> y;  // [t][ch] continuous gains
  std::vector<std::vector<int>> y0;                  // [t][ch]
  std::vector<std::vector<std::vector<GainRef>>> z;  // [t][ch] integer gains
  std::vector<std::vector<int>> z0;                  // [t][ch]
  std::vector<std::string> names;                    // per variable id
  std::vector<char> is_integer;                      // per variable id
};

PolicyLayout build_policy_layout(const SystemModel& model, const LiftingSpec& spec,
                                 const InformationMask& mask);

/// Box bounds used when the policy data become MILP variables. Integer gains
/// need finite boxes for branch and bound.
struct PolicyBounds {
  double y_abs = milp::kInf;
  double z_lower = -10.0;
  double z_upper = 10.0;
  double z0_lower = -10.0;
  double z0_upper = 10.0;
};

/// Declares one MILP variable per policy entry, in layout order, starting at
/// the model's current variable count. Returns the id offset.
int declare_policy_vars(milp::MilpModel& m, const PolicyLayout& layout,
                        const PolicyBounds& bounds, const std::string& prefix = "");

/// Affine-in-lifted-disturbance quantity with entries that are themselves
/// affine in the policy decision variables: value = coef * z_lifted + cons.
struct CompiledAffine {
  std::vector<AffineVec> coef;  // [row][lifted index]
  AffineVec cons;               // [row]
};

/// Robust rows compiled to m[r] >= e[r] . z_lifted for all lifted points.
struct CompiledConstraints {
  std::vector<AffineVec> e;
  AffineVec m;
};

/// Total discounted cost compiled to max_k d[k] . z_lifted + r[k].
struct CompiledCost {
  std::vector<AffineVec> d;
  AffineVec r;
};

struct CompileOptions {
  long max_cost_pieces = 100000;  // cap on the piece-combination count K
};

/// Symbolic policy outputs and state trajectory over the lifted disturbance.
CompiledAffine compile_control(const SystemModel& model, const LiftingSpec& spec,
                               const PolicyLayout& layout, int t, bool integer_part);
std::vector<CompiledAffine> roll_out_state(const SystemModel& model, const LiftingSpec& spec,
                                           const PolicyLayout& layout);
CompiledConstraints compile_constraints(const SystemModel& model, const LiftingSpec& spec,
                                        const PolicyLayout& layout);
CompiledCost compile_cost(const SystemModel& model, const LiftingSpec& spec,
                          const PolicyLayout& layout, const CompileOptions& options = {});

struct CompiledProblem {
  SystemModel model;
  LiftingSpec spec;
  BlockIndex index;
  PolicyLayout layout;
  CompiledConstraints constraints;
  CompiledCost cost;
};

CompiledProblem compile(const SystemModel& model, const LiftingSpec& spec,
                        const InformationMask& mask, const CompileOptions& options = {});

/// Direct simulation of a numeric policy along one disturbance trajectory.
struct Trajectory {
  std::vector<Eigen::VectorXd> x;      // T+1 entries, x[0] = x0
  std::vector<Eigen::VectorXd> u;      // T entries
  std::vector<Eigen::VectorXd> gamma;  // T entries
  std::vector<double> stage_cost;      // discounted
  double total_cost = 0.0;
  double max_residual = 0.0;  // max row of (sum ... - q); -inf when no rows
};

Trajectory evaluate_policy(const SystemModel& model, const LiftingSpec& spec,
                           const PolicyLayout& layout, const std::vector<double>& policy,
                           const std::vector<double>& xi);

/// Numeric piecewise function over the lifted vector, obtained by
/// substituting policy values into a compiled cost.
struct NumericPieces {
  std::vector<Eigen::VectorXd> g;
  std::vector<double> h;
};
NumericPieces substitute_cost(const CompiledCost& cost, const std::vector<double>& policy);

struct NumericConstraints {
  Eigen::MatrixXd e;  // n_rows x lifted dim
  Eigen::VectorXd m;
};
NumericConstraints substitute_constraints(const CompiledConstraints& cons, int lifted_dim,
                                          const std::vector<double>& policy);

}  // namespace drlcp
