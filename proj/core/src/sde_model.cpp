#include "qfl/sde_model.hpp"

#include <cmath>
#include <string>

#include "qfl/errors.hpp"

namespace qfl {

MeanFieldHook::MeanFieldHook(double t0, double dt, std::vector<ComplexMatrix> values)
    : t0_(t0), dt_(dt), values_(std::move(values)) {
  if (!(dt_ > 0.0)) throw InvalidArgument("MeanFieldHook: dt must be positive");
  if (values_.empty()) throw InvalidArgument("MeanFieldHook: empty value list");
  for (const auto& v : values_) {
    require_same_dim(values_.front(), v, "MeanFieldHook");
    if (!is_hermitian(v)) throw InvalidArgument("MeanFieldHook: values must be Hermitian");
  }
}

const ComplexMatrix& MeanFieldHook::at(double t) const {
  const double u = (t - t0_) / dt_;
  // small offset so grid times n*dt land on index n despite rounding
  const double k = std::floor(u + 1e-7);
  if (k <= 0.0) return values_.front();
  return at_index(static_cast<std::size_t>(k));
}

const ComplexMatrix& MeanFieldHook::at_index(std::size_t k) const {
  return k < values_.size() ? values_[k] : values_.back();
}

void SdeModel::validate() const {
  require_square(hamiltonian, "SdeModel hamiltonian");
  if (!is_hermitian(hamiltonian)) throw InvalidArgument("SdeModel: hamiltonian is not Hermitian");
  for (const auto& l : couplings) require_same_dim(hamiltonian, l, "SdeModel coupling");
  for (const auto& h : control_ops) {
    require_same_dim(hamiltonian, h, "SdeModel control operator");
    if (!is_hermitian(h)) throw InvalidArgument("SdeModel: control operator is not Hermitian");
  }
  if (mean_field && mean_field->dim() != dim()) {
    throw DimensionError("SdeModel: mean-field hook dim " + std::to_string(mean_field->dim()) +
                         " != " + std::to_string(dim()));
  }
}

SdeModel ising_qubit_model() {
  SdeModel m;
  m.hamiltonian = ComplexMatrix::Zero(2, 2);
  m.couplings = {pauli::z()};
  m.control_ops = {pauli::x()};
  return m;
}

}  // namespace qfl
