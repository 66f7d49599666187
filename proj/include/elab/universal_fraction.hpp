#pragma once

#include "elab/known_exponents.hpp"

#include <optional>
#include <string>
#include <vector>

namespace elab {

/// A finite family of candidate channels sharing alphabets and composition.
struct ChannelFamily {
  enum class Kind { bsc_grid, dmc_set };
  Kind kind = Kind::bsc_grid;
  std::vector<double> thetas;  // bsc_grid crossover probabilities
  std::vector<Dmc> channels;   // transition matrices (mirrors thetas for bsc_grid)
  Eigen::VectorXd px;

  int size() const { return static_cast<int>(channels.size()); }
  const Dmc& channel(int i) const { return channels[static_cast<std::size_t>(i)]; }
  bool uniform_px(double tol = 1e-12) const;

  static ChannelFamily bsc_family(std::vector<double> thetas, Eigen::VectorXd px);
  static ChannelFamily dmc_family(std::vector<Dmc> channels, Eigen::VectorXd px);
};

/// Exact per-member exponents for fixed (r, t); members with E1 = 0 have a
/// vacuous fraction guarantee and are excluded from the competition.
struct FamilyExponents {
  double r = 0.0, t = 0.0;
  std::vector<double> e1;
  std::vector<double> e_b;
  std::vector<char> positive;
  bool any_infinite = false;

  int positive_count() const;
  std::vector<int> excluded() const;
};

FamilyExponents compute_family_exponents(const ChannelFamily& family, double r, double t,
                                         const GeneralSolverOptions& opt = {});

/// max over the family of xi E1(theta) + t + E_Qt log W_theta; -inf terms are
/// skipped unless every term is -inf.
double g_value(double xi, double r, double t, const ChannelFamily& family,
               const FamilyExponents& fe, const JointDist& qt);

/// G(qt) - G(q) - t.
double omega_universal(double xi, double r, double t, const ChannelFamily& family,
                       const FamilyExponents& fe, const JointDist& q, const JointDist& qt);

/// max over positive members of xi E1 - min over coupled pairs of
/// D(Qt||px x W) + |I(Q)-r|^+ subject to the universal omega constraint.
double condition_a_lhs(double xi, double r, double t, const ChannelFamily& family,
                       const FamilyExponents& fe, const GeneralSolverOptions& opt = {});

/// max over members of xi E1(theta) - E_b(theta).
double condition_b_lhs(double xi, double r, double t, const ChannelFamily& family,
                       const FamilyExponents& fe);

enum class ActiveCondition { a, b, both };

struct FractionResult {
  double xi = 0.0;
  ActiveCondition active = ActiveCondition::both;
  int argmax_theta = -1;
  double slack_a = 0.0, slack_b = 0.0;
  bool degenerate = false;
  std::vector<int> excluded_members;
};

struct XiSearchOptions {
  double xi_step = 1e-3;
  double q_step = 5e-4;
  double tol = 1e-6;
  GeneralSolverOptions solver;
};

FractionResult xi_star(double r, double t, const ChannelFamily& family,
                       const XiSearchOptions& opt = {});
FractionResult xi_star(double r, double t, const ChannelFamily& family,
                       const FamilyExponents& fe, const XiSearchOptions& opt = {});

/// Feasible-q boundaries of the BSC membership set for a given qtilde:
/// feasible q are {q <= q1} union {q >= q2} (all q when all_feasible).
struct QBoundaries {
  std::optional<double> q1, q2;
  bool all_feasible = false;
};

QBoundaries bsc_feasible_q_set(double xi, double r, double t, const ChannelFamily& family,
                               const FamilyExponents& fe, double qtilde, int q_grid = 2001);

double g_of_boundaries(const QBoundaries& b);
double g_of_boundaries(double q1, double q2);

FractionResult xi_star_bsc(double r, double t, const ChannelFamily& family,
                           const XiSearchOptions& opt = {});
FractionResult xi_star_bsc(double r, double t, const ChannelFamily& family,
                           const FamilyExponents& fe, const XiSearchOptions& opt = {});

}  // namespace elab
