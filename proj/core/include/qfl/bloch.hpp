#pragma once

#include <cstdint>
#include <vector>

#include "qfl/integrator.hpp"

namespace qfl {

struct BlochPath {
  std::vector<double> times;
  std::vector<Eigen::Vector3d> states;
  std::vector<double> controls;     // per step
  std::vector<double> innovations;  // per step
  long renormalizations = 0;
};

/// Euler-Maruyama step of the monitored Ising qubit in Bloch coordinates:
///   dx = (-2 xi y - 2x) dt - 2 z x dW
///   dy = (2 xi x - 2y - 2 alpha z) dt - 2 z y dW
///   dz = 2 alpha y dt + 2 (1 - z^2) dW
/// With clip set, a vector leaving the unit ball is rescaled onto the sphere
/// and true is returned.
bool bloch_step(Eigen::Vector3d& v, double xi_z, double alpha, double dw, double dt, bool clip = true);

/// Same dynamics as the matrix integrator on ising_qubit_model() with the
/// hook's (0,0) entry read as xi_z. The policy sees bloch_to_density(v).
/// Noise is channel 0 of cfg.seed, so paths are step-for-step comparable.
BlochPath simulate_bloch(const Eigen::Vector3d& v0, const MeanFieldHook* hook, const ControlPolicy& policy,
                         const IntegratorConfig& cfg);

}  // namespace qfl
