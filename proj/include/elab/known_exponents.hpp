#pragma once

#include "elab/info_math.hpp"

#include <cstdint>
#include <optional>

namespace elab {

/// Inputs of an exact erasure/list exponent computation.
struct ExponentQuery {
  double r = 0.0;  // coding rate, nats
  double t = 0.0;  // threshold, nats; t >= 0 erasure mode, t < 0 list mode
  Dmc w;
  Eigen::VectorXd px;
};

enum class ExponentBranch { a, b, none };

/// A (Q, Qt) pair sharing marginals: Q_X = Qt_X = P_X, Q_Y = Qt_Y.
struct MarginalPair {
  JointDist q;
  JointDist qt;
};

struct BranchResult {
  double value = kInf;
  std::optional<MarginalPair> minimizer;
};

struct ExponentResult {
  double e1 = kInf;
  double e2 = kInf;
  ExponentBranch branch = ExponentBranch::none;
  std::optional<MarginalPair> minimizer;  // general route
  std::optional<double> qtilde_star;      // BSC route (crossover of the minimizer)
};

struct GeneralSolverOptions {
  int qy_grid = 161;
  int z_grid = 161;
  int refine_rounds = 2;
  double golden_tol = 1e-11;
  // projected-gradient fallback for alphabets beyond 2x2
  int pgd_starts = 8;
  int pgd_iters = 350;
  std::uint64_t seed = 0x5eedf00d;
};

/// E_Qt log W - E_Q log W - t; may be +-inf.
double omega_hat(const JointDist& q, const JointDist& qt, const Dmc& w, double t);

/// min over (Q,Qt) sharing marginals with I(Q) >= r and omega_hat <= 0 of
/// D(Qt||px x W) + I(Q) - r. +inf when the feasible set is empty.
BranchResult e_a_general(const ExponentQuery& query, const GeneralSolverOptions& opt = {});

/// min of D(Qt||px x W) over Qt whose bound set admits a Q with I(Q) <= r.
BranchResult e_b_general(const ExponentQuery& query, const GeneralSolverOptions& opt = {});

ExponentResult e1_general(const ExponentQuery& query, const GeneralSolverOptions& opt = {});

/// One-dimensional BSC specializations. theta > 1/2 is reduced by output
/// relabeling; theta == 1/2 with t != 0 is a domain error (use e1_bsc).
double e_a_bsc(double r, double t, double theta);
double e_b_bsc(double r, double t, double theta);
ExponentResult e1_bsc(double r, double t, double theta);

inline double e2_from_e1(double e1, double t) { return e1 + t; }

}  // namespace elab
