#pragma once

#include "holistic/core.hpp"
#include "holistic/amplitude_model.hpp"
#include "holistic/subgrid.hpp"
#include "holistic/direct_solver.hpp"
#include "holistic/analysis.hpp"
