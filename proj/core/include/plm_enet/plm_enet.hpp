#pragma once

#include "plm_enet/data_model.hpp"
#include "plm_enet/diagnostics.hpp"
#include "plm_enet/enet_solver.hpp"
#include "plm_enet/error.hpp"
#include "plm_enet/kernel_smoothing.hpp"
#include "plm_enet/model_selection.hpp"
#include "plm_enet/parallel.hpp"
#include "plm_enet/simulation.hpp"
