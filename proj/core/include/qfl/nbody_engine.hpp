#pragma once

#include <vector>

#include "qfl/ensemble.hpp"
#include "qfl/feedback.hpp"
#include "qfl/nbody_model.hpp"

namespace qfl {

/// One step with N independent channels; entrywise update when the model is
/// diagonal, generic dense step otherwise.
DensityOperator nbody_sme_step(const DensityOperator& rho, const NBodyModel& model, std::span<const double> controls,
                               std::span<const double> dw, double dt, bool repair = true, double t = 0.0,
                               StepStats* stats = nullptr);

/// Site l's control from law l evaluated on partial_trace(rho, l).
ControlPolicy site_feedback_policy(std::vector<FeedbackLaw> laws);

TrajectoryRecord nbody_simulate(const DensityOperator& rho0, const NBodyModel& model, const ControlPolicy& policy,
                                const IntegratorConfig& cfg);

EnsembleSummary nbody_ensemble(const DensityOperator& rho0, const NBodyModel& model, const ControlPolicy& policy,
                               const IntegratorConfig& cfg, const EnsembleConfig& ens);

}  // namespace qfl
