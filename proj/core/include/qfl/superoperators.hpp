#pragma once

#include <span>

#include "qfl/sde_model.hpp"

namespace qfl {

/// -i[H + sum_k beta_k Hc_k + hook(t), rho] + sum_L (L rho L^dagger - {L^dagger L, rho}/2)
ComplexMatrix lindbladian(const ComplexMatrix& rho, const SdeModel& model, std::span<const double> controls,
                          double t = 0.0);

/// L rho L^dagger - {L^dagger L, rho}/2
ComplexMatrix dissipator(const ComplexMatrix& rho, const ComplexMatrix& l);

/// L rho + rho L^dagger - tr((L + L^dagger) rho) rho
ComplexMatrix measurement_superop(const ComplexMatrix& rho, const ComplexMatrix& l);

/// H + sum_k beta_k Hc_k + hook(t)
ComplexMatrix effective_hamiltonian(const SdeModel& model, std::span<const double> controls, double t);

}  // namespace qfl
