#include "elab/info_math.hpp"

#include <cmath>

namespace elab {

namespace {

void check_nonneg_sums_to_one(const Eigen::MatrixXd& m, const char* what) {
  if (m.size() == 0) throw std::invalid_argument(std::string(what) + ": empty");
  if ((m.array() < -1e-15).any())
    throw std::invalid_argument(std::string(what) + ": negative entry");
  if (std::abs(m.sum() - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(what) + ": does not sum to 1");
}

}  // namespace

JointDist::JointDist(Eigen::MatrixXd m) : p(std::move(m)) {
  check_nonneg_sums_to_one(p, "JointDist");
}

Dmc::Dmc(Eigen::MatrixXd m) : w(std::move(m)) {
  if (w.size() == 0) throw std::invalid_argument("Dmc: empty");
  if ((w.array() < -1e-15).any()) throw std::invalid_argument("Dmc: negative entry");
  for (int x = 0; x < w.rows(); ++x) {
    if (std::abs(w.row(x).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("Dmc: row " + std::to_string(x) + " not stochastic");
  }
}

Dmc Dmc::bsc(double theta) {
  if (theta < 0.0 || theta > 1.0) throw std::domain_error("bsc: theta outside [0,1]");
  Eigen::MatrixXd w(2, 2);
  w << 1.0 - theta, theta, theta, 1.0 - theta;
  return Dmc(w);
}

JointDist product_joint(const Eigen::VectorXd& px, const Dmc& w) {
  if (px.size() != w.nx()) throw std::invalid_argument("product_joint: shape mismatch");
  return JointDist(px.asDiagonal() * w.w);
}

bool is_distribution(const Eigen::VectorXd& p, double tol) {
  return (p.array() >= -tol).all() && std::abs(p.sum() - 1.0) <= tol;
}

double binary_entropy(double d) {
  if (d < 0.0 || d > 1.0) throw std::domain_error("binary_entropy: argument outside [0,1]");
  double v = 0.0;
  if (d > 0.0) v -= d * std::log(d);
  if (d < 1.0) v -= (1.0 - d) * std::log(1.0 - d);
  return v;
}

double binary_divergence(double q, double p) {
  if (q < 0.0 || q > 1.0 || p < 0.0 || p > 1.0)
    throw std::domain_error("binary_divergence: argument outside [0,1]");
  if (p == 0.0) return q == 0.0 ? 0.0 : kInf;
  if (p == 1.0) return q == 1.0 ? 0.0 : kInf;
  double v = 0.0;
  if (q > 0.0) v += q * std::log(q / p);
  if (q < 1.0) v += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
  return v;
}

double entropy(const Eigen::VectorXd& p) {
  double v = 0.0;
  for (int i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) v -= p[i] * std::log(p[i]);
  return v;
}

double entropy_y(const JointDist& q) { return entropy(q.marginal_y()); }
double entropy_x(const JointDist& q) { return entropy(q.marginal_x()); }

double cond_entropy_y_given_x(const JointDist& q) {
  // H(X,Y) - H(X), with 0 log 0 terms skipped
  double joint = 0.0;
  for (int x = 0; x < q.nx(); ++x)
    for (int y = 0; y < q.ny(); ++y)
      if (q.p(x, y) > 0.0) joint -= q.p(x, y) * std::log(q.p(x, y));
  return joint - entropy_x(q);
}

double cond_entropy_x_given_y(const JointDist& q) {
  double joint = 0.0;
  for (int x = 0; x < q.nx(); ++x)
    for (int y = 0; y < q.ny(); ++y)
      if (q.p(x, y) > 0.0) joint -= q.p(x, y) * std::log(q.p(x, y));
  return joint - entropy_y(q);
}

double mutual_information(const JointDist& q) {
  const Eigen::VectorXd qx = q.marginal_x();
  const Eigen::VectorXd qy = q.marginal_y();
  double v = 0.0;
  for (int x = 0; x < q.nx(); ++x)
    for (int y = 0; y < q.ny(); ++y) {
      const double m = q.p(x, y);
      if (m > 0.0) v += m * std::log(m / (qx[x] * qy[y]));
    }
  return v;
}

double joint_divergence(const JointDist& qt, const Eigen::VectorXd& px, const Dmc& w) {
  if (qt.nx() != w.nx() || qt.ny() != w.ny() || px.size() != w.nx())
    throw std::invalid_argument("joint_divergence: shape mismatch");
  double v = 0.0;
  for (int x = 0; x < qt.nx(); ++x)
    for (int y = 0; y < qt.ny(); ++y) {
      const double m = qt.p(x, y);
      if (m <= 0.0) continue;
      const double ref = px[x] * w.w(x, y);
      if (ref <= 0.0) return kInf;
      v += m * std::log(m / ref);
    }
  return v;
}

double expected_log_w(const JointDist& q, const Dmc& w) {
  if (q.nx() != w.nx() || q.ny() != w.ny())
    throw std::invalid_argument("expected_log_w: shape mismatch");
  double v = 0.0;
  for (int x = 0; x < q.nx(); ++x)
    for (int y = 0; y < q.ny(); ++y) {
      const double m = q.p(x, y);
      if (m <= 0.0) continue;
      if (w.w(x, y) <= 0.0) return -kInf;
      v += m * std::log(w.w(x, y));
    }
  return v;
}

double gv_distance(double r) {
  if (r < -1e-15 || r > kLog2 + 1e-15) throw std::domain_error("gv_distance: rate outside [0, log 2]");
  r = std::min(std::max(r, 0.0), kLog2);
  if (r == 0.0) return 0.5;
  if (r == kLog2) return 0.0;
  const double target = kLog2 - r;
  double lo = 0.0, hi = 0.5;
  // h is increasing on [0, 1/2]
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double beta_slope(double theta) {
  if (theta <= 0.0 || theta >= 1.0) throw std::domain_error("beta_slope: theta outside (0,1)");
  return std::log((1.0 - theta) / theta);
}

}  // namespace elab
