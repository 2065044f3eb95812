#pragma once

#include "fracfem/assembly.hpp"
#include "fracfem/cli_runner.hpp"
#include "fracfem/error_analysis.hpp"
#include "fracfem/errors.hpp"
#include "fracfem/fe_space.hpp"
#include "fracfem/frac_operators.hpp"
#include "fracfem/fractional_calculus.hpp"
#include "fracfem/linear_algebra.hpp"
#include "fracfem/newton_solver.hpp"
#include "fracfem/power_sum.hpp"
#include "fracfem/problem.hpp"
#include "fracfem/quadrature.hpp"
#include "fracfem/special_functions.hpp"
#include "fracfem/verify.hpp"
