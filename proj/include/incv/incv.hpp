#pragma once

#include "incv/errors.hpp"
#include "incv/numerics/normal.hpp"
#include "incv/numerics/quadrature.hpp"
#include "incv/numerics/roots.hpp"
#include "incv/numerics/newton.hpp"
#include "incv/distributions.hpp"
#include "incv/empirical.hpp"
#include "incv/analytic.hpp"
#include "incv/probit_study.hpp"
#include "incv/study_runner.hpp"
#include "incv/io.hpp"
#include "incv/simulate.hpp"
