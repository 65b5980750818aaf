#ifndef MIXENT_MIXENT_HPP
#define MIXENT_MIXENT_HPP

#include "mixent/applications.hpp"
#include "mixent/bounds.hpp"
#include "mixent/density.hpp"
#include "mixent/divergence.hpp"
#include "mixent/mc.hpp"
#include "mixent/model_io.hpp"
#include "mixent/oracle.hpp"
#include "mixent/quadrature.hpp"
#include "mixent/special_functions.hpp"

#endif
