#include "qfl/meanfield.hpp"

#include <cmath>
#include <string>

#include "qfl/embedding.hpp"
#include "qfl/errors.hpp"

namespace qfl {

double TwoBodyKernel::exchange_defect(const ComplexMatrix& values) {
  const int d = local_dimension(values.rows(), 2);
  double worst = 0.0;
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y)
      for (int xp = 0; xp < d; ++xp)
        for (int yp = 0; yp < d; ++yp) {
          const Complex a = values(x + d * y, xp + d * yp);
          const Complex b = values(y + d * x, yp + d * xp);
          worst = std::max(worst, std::abs(a - b));
        }
  return worst;
}

double TwoBodyKernel::hermitian_defect(const ComplexMatrix& values) {
  return (values - values.adjoint()).cwiseAbs().maxCoeff();
}

TwoBodyKernel::TwoBodyKernel(ComplexMatrix values) : a_(std::move(values)) {
  require_square(a_, "TwoBodyKernel");
  d_ = local_dimension(a_.rows(), 2);
  if (exchange_defect(a_) > 1e-12) throw InvalidArgument("TwoBodyKernel: exchange symmetry violated");
  if (hermitian_defect(a_) > 1e-12) throw InvalidArgument("TwoBodyKernel: Hermitian symmetry violated");
}

TwoBodyKernel ising_kernel() {
  ComplexMatrix a = ComplexMatrix::Zero(4, 4);
  a.diagonal() << 1.0, -1.0, -1.0, 1.0;
  return TwoBodyKernel(std::move(a));
}

ComplexMatrix meanfield_operator(const TwoBodyKernel& kernel, const ComplexMatrix& rho) {
  const int d = kernel.local_dim();
  if (rho.rows() != d || rho.cols() != d) {
    throw DimensionError("meanfield_operator: kernel alphabet " + std::to_string(d) + " vs state dim " +
                         std::to_string(rho.rows()));
  }
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (int x = 0; x < d; ++x)
    for (int xp = 0; xp < d; ++xp) {
      Complex s = 0.0;
      for (int y = 0; y < d; ++y)
        for (int yp = 0; yp < d; ++yp) s += kernel(x, y, xp, yp) * std::conj(rho(y, yp));
      out(x, xp) = s;
    }
  return out;
}

ComplexMatrix meanfield_operator(const TwoBodyKernel& kernel, const DensityOperator& rho) {
  return meanfield_operator(kernel, rho.matrix());
}

std::vector<double> MeanFieldFlow::times() const {
  std::vector<double> out(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) out[k] = t0 + static_cast<double>(k) * dt;
  return out;
}

const DensityOperator& MeanFieldFlow::at(double t) const {
  const double k = std::floor((t - t0) / dt + 1e-7);
  if (k <= 0.0) return states.front();
  const auto i = static_cast<std::size_t>(k);
  return i < states.size() ? states[i] : states.back();
}

double MeanFieldFlow::continuity_constant() const {
  double c = 0.0;
  for (std::size_t k = 1; k < states.size(); ++k) {
    c = std::max(c, hs_distance(states[k].matrix(), states[k - 1].matrix()) / dt);
  }
  return c;
}

void MeanFieldFlow::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("MeanFieldFlow: dt must be positive");
  if (states.empty()) throw InvalidArgument("MeanFieldFlow: no states");
  for (const auto& s : states) DensityOperator check(s.matrix());
}

MeanFieldFlow constant_flow(const DensityOperator& rho0, const IntegratorConfig& cfg) {
  cfg.validate();
  MeanFieldFlow f;
  f.t0 = cfg.t0;
  f.dt = cfg.dt;
  f.states.assign(static_cast<std::size_t>(cfg.steps() + 1), rho0);
  return f;
}

double sup_distance(const MeanFieldFlow& a, const MeanFieldFlow& b) {
  if (a.states.size() != b.states.size()) throw DimensionError("sup_distance: flows live on different grids");
  double d = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    d = std::max(d, hs_distance(a.states[k].matrix(), b.states[k].matrix()));
  }
  return d;
}

std::shared_ptr<const MeanFieldHook> meanfield_hook(const TwoBodyKernel& kernel, const MeanFieldFlow& flow) {
  std::vector<ComplexMatrix> ops;
  ops.reserve(flow.states.size());
  for (const auto& s : flow.states) ops.push_back(hermitian_part(meanfield_operator(kernel, s.matrix())));
  return std::make_shared<const MeanFieldHook>(flow.t0, flow.dt, std::move(ops));
}

}  // namespace qfl
