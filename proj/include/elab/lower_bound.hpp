#pragma once

#include "elab/universal_fraction.hpp"

#include <utility>
#include <vector>

namespace elab {

struct SaddleDiagnostics {
  int theta_star = -1;
  int theta_dprime_star = -1;
  int theta_prime_star = -1;
  double s_star = 0.0, rho_star = 0.0;                  // constrained saddle
  double s_star_relaxed = 0.0, rho_star_relaxed = 0.0;  // relaxed saddle
  double constrained_value = 0.0, relaxed_value = 0.0;
  bool constraint_active = false;   // relaxed s* exceeds its rho*
  bool theta_prime_differs = false;
  bool s_cap_hit = false;
  double xi_crit_relaxed = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<int, int>> skipped_pairs;
};

struct GridSpec {
  int srho_grid = 201;
  int refine_rounds = 2;
  int qy_grid = 2001;
  double s_max = 4.0;  // search cap for the relaxed multiplier
  int threads = 0;
};

/// min over conditionals Q_{X|Y} with X-marginal px of I(Q) - lam E_Q log W.
double f_term(const Eigen::VectorXd& qy, double lam, const Dmc& w, const Eigen::VectorXd& px);

/// min over Q_Y of F(Q_Y, 1-s, theta) + rho F(Q_Y, s/rho, theta'') - H(Q_Y).
double e_gallager(const Dmc& w_theta, const Dmc& w_theta_dprime, double s, double rho,
                  const Eigen::VectorXd& px, const GridSpec& spec = {});

struct LowerBoundResult {
  double xi = 0.0;
  bool degenerate = false;
  SaddleDiagnostics diag;
};

LowerBoundResult xi_lower(double r, double t, const ChannelFamily& family,
                          const FamilyExponents& fe, const GridSpec& spec = {});
LowerBoundResult xi_lower(double r, double t, const ChannelFamily& family,
                          const GridSpec& spec = {});

/// The competitive-minimax Lagrangian evaluated literally at family indices.
double psi(double r, double t, int theta, int theta_prime, int theta_dprime,
           const JointDist& q, const JointDist& qt, double rho, double s, double xi,
           const ChannelFamily& family, const FamilyExponents& fe);

/// Constrained (s <= rho, theta' = theta) and relaxed (s free, theta' free)
/// saddle values at a given xi, with the achieving multipliers.
SaddleDiagnostics gap_diagnostics(double r, double t, const ChannelFamily& family,
                                  const FamilyExponents& fe, double xi,
                                  const GridSpec& spec = {}, bool with_xi_crit = true);

}  // namespace elab
