#pragma once

#include "maslov/chart.hpp"
#include "maslov/crossings.hpp"
#include "maslov/errors.hpp"
#include "maslov/matrixkit.hpp"
#include "maslov/models.hpp"
#include "maslov/riccati.hpp"
#include "maslov/system.hpp"
#include "maslov/tolerances.hpp"
#include "maslov/unitary.hpp"
