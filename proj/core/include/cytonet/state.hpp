#pragma once

#include <Eigen/Dense>

namespace cytonet {

/// Concentrations of every species at one instant.
struct State {
  Eigen::VectorXd x;
  double t = 0.0;

  State() = default;
  State(Eigen::VectorXd values, double time) : x(std::move(values)), t(time) {}

  Eigen::Index size() const noexcept { return x.size(); }
  double operator[](Eigen::Index i) const { return x[i]; }
};

inline State zero_state(Eigen::Index n, double t = 0.0) {
  return State{Eigen::VectorXd::Zero(n), t};
}

inline bool is_nonnegative(const Eigen::VectorXd& x) noexcept {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0)) return false;
  }
  return true;
}

}  // namespace cytonet
