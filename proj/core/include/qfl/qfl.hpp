#pragma once

#include "qfl/bloch.hpp"
#include "qfl/chaos.hpp"
#include "qfl/density.hpp"
#include "qfl/dpp.hpp"
#include "qfl/embedding.hpp"
#include "qfl/ensemble.hpp"
#include "qfl/errors.hpp"
#include "qfl/feedback.hpp"
#include "qfl/functional.hpp"
#include "qfl/generator.hpp"
#include "qfl/integrator.hpp"
#include "qfl/linalg.hpp"
#include "qfl/lyapunov.hpp"
#include "qfl/meanfield.hpp"
#include "qfl/nbody_engine.hpp"
#include "qfl/nbody_model.hpp"
#include "qfl/noise.hpp"
#include "qfl/picard.hpp"
#include "qfl/properties.hpp"
#include "qfl/sde_model.hpp"
#include "qfl/superoperators.hpp"
