#include "qfl/bloch.hpp"

#include <array>
#include <cmath>

#include "qfl/errors.hpp"
#include "qfl/noise.hpp"

namespace qfl {

bool bloch_step(Eigen::Vector3d& v, double xi_z, double alpha, double dw, double dt, bool clip) {
  const double x = v.x(), y = v.y(), z = v.z();
  v.x() = x + (-2.0 * xi_z * y - 2.0 * x) * dt - 2.0 * z * x * dw;
  v.y() = y + (2.0 * xi_z * x - 2.0 * y - 2.0 * alpha * z) * dt - 2.0 * z * y * dw;
  v.z() = z + 2.0 * alpha * y * dt + 2.0 * (1.0 - z * z) * dw;
  const double n = v.norm();
  if (clip && n > 1.0) {
    v /= n;
    return true;
  }
  return false;
}

BlochPath simulate_bloch(const Eigen::Vector3d& v0, const MeanFieldHook* hook, const ControlPolicy& policy,
                         const IntegratorConfig& cfg) {
  cfg.validate();
  if (v0.norm() > 1.0 + 1e-9) throw InvalidArgument("simulate_bloch: initial vector outside the unit ball");
  BlochPath out;
  out.times = cfg.record_times();
  const long steps = cfg.steps();
  out.controls.reserve(static_cast<std::size_t>(steps));
  out.innovations.reserve(static_cast<std::size_t>(steps));
  WienerIncrements noise(cfg.seed, 1, cfg.dt);

  Eigen::Vector3d v = v0;
  ComplexMatrix rho(2, 2);
  std::array<double, 1> u{0.0};
  out.states.push_back(v);
  for (long n = 0; n < steps; ++n) {
    const double t = cfg.t0 + static_cast<double>(n) * cfg.dt;
    if (policy) {
      rho << 0.5 * (1.0 + v.z()), 0.5 * Complex(v.x(), -v.y()), 0.5 * Complex(v.x(), v.y()), 0.5 * (1.0 - v.z());
      policy(rho, t, u);
    }
    const double xi = hook ? hook->at(t)(0, 0).real() : 0.0;
    const double dw = noise.draw(0);
    if (bloch_step(v, xi, u[0], dw, cfg.dt, cfg.repair_positivity)) ++out.renormalizations;
    out.controls.push_back(u[0]);
    out.innovations.push_back(dw);
    if (cfg.is_record_step(n + 1)) out.states.push_back(v);
  }
  return out;
}

}  // namespace qfl
