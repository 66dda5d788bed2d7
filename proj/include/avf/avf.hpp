#pragma once

#include "avf/bseries.hpp"
#include "avf/experiments.hpp"
#include "avf/integrators.hpp"
#include "avf/problems.hpp"
#include "avf/quadrature.hpp"
#include "avf/rational.hpp"
#include "avf/reference_coefficients.hpp"
#include "avf/substitution_table.hpp"
#include "avf/trees.hpp"
#include "avf/vectorfield.hpp"
