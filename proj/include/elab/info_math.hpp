#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>

namespace elab {

inline constexpr double kLog2 = 0.6931471805599453094;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Joint probability assignment on X x Y. Rows index X, columns index Y.
struct JointDist {
  Eigen::MatrixXd p;

  JointDist() = default;
  explicit JointDist(Eigen::MatrixXd m);

  int nx() const { return static_cast<int>(p.rows()); }
  int ny() const { return static_cast<int>(p.cols()); }
  Eigen::VectorXd marginal_x() const { return p.rowwise().sum(); }
  Eigen::VectorXd marginal_y() const { return p.colwise().sum().transpose(); }
};

/// Discrete memoryless channel; row x of `w` is W(.|x) and sums to one.
struct Dmc {
  Eigen::MatrixXd w;

  Dmc() = default;
  explicit Dmc(Eigen::MatrixXd m);

  int nx() const { return static_cast<int>(w.rows()); }
  int ny() const { return static_cast<int>(w.cols()); }

  static Dmc bsc(double theta);
};

/// P_X x W as a joint distribution.
JointDist product_joint(const Eigen::VectorXd& px, const Dmc& w);

bool is_distribution(const Eigen::VectorXd& p, double tol = 1e-12);

/// Binary entropy h(d) in nats, 0 log 0 = 0.
double binary_entropy(double d);

/// Binary divergence D(q||p) in nats; +inf when absolute continuity fails.
double binary_divergence(double q, double p);

/// Entropy of a distribution vector in nats.
double entropy(const Eigen::VectorXd& p);

double entropy_y(const JointDist& q);
double entropy_x(const JointDist& q);
double cond_entropy_y_given_x(const JointDist& q);
double cond_entropy_x_given_y(const JointDist& q);
double mutual_information(const JointDist& q);

/// D(qt || px x w); +inf when qt puts mass where px x w has none.
double joint_divergence(const JointDist& qt, const Eigen::VectorXd& px, const Dmc& w);

/// E_Q log W(Y|X); -inf when Q puts mass on a zero transition.
double expected_log_w(const JointDist& q, const Dmc& w);

/// Smaller root of h(delta) = log 2 - r, bisection to 1e-12.
double gv_distance(double r);

/// Per-bit log likelihood slope of a BSC: log((1-theta)/theta).
double beta_slope(double theta);

}  // namespace elab
