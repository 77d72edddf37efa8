#include "qfl/superoperators.hpp"

#include <string>

#include "qfl/errors.hpp"

namespace qfl {

ComplexMatrix effective_hamiltonian(const SdeModel& model, std::span<const double> controls, double t) {
  if (controls.size() != model.controls()) {
    throw DimensionError("expected " + std::to_string(model.controls()) + " controls, got " +
                         std::to_string(controls.size()));
  }
  ComplexMatrix h = model.hamiltonian;
  for (std::size_t k = 0; k < controls.size(); ++k) h += controls[k] * model.control_ops[k];
  if (model.mean_field) h += model.mean_field->at(t);
  return h;
}

ComplexMatrix dissipator(const ComplexMatrix& rho, const ComplexMatrix& l) {
  require_same_dim(rho, l, "dissipator");
  const ComplexMatrix ldl = l.adjoint() * l;
  return l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
}

ComplexMatrix lindbladian(const ComplexMatrix& rho, const SdeModel& model, std::span<const double> controls,
                          double t) {
  require_same_dim(rho, model.hamiltonian, "lindbladian");
  const ComplexMatrix h = effective_hamiltonian(model, controls, t);
  ComplexMatrix out = -kImag * (h * rho - rho * h);
  for (const auto& l : model.couplings) out += dissipator(rho, l);
  return out;
}

ComplexMatrix measurement_superop(const ComplexMatrix& rho, const ComplexMatrix& l) {
  require_same_dim(rho, l, "measurement_superop");
  const ComplexMatrix lr = l * rho;
  const ComplexMatrix rl = rho * l.adjoint();
  const Complex m = lr.trace() + rl.trace();
  return lr + rl - m.real() * rho;
}

}  // namespace qfl
