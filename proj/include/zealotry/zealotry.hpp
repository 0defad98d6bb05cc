#pragma once

#include "zealotry/closed_form.hpp"
#include "zealotry/congress.hpp"
#include "zealotry/equilibrium.hpp"
#include "zealotry/generators.hpp"
#include "zealotry/network.hpp"
#include "zealotry/network_io.hpp"
#include "zealotry/optimize.hpp"
#include "zealotry/polynomial.hpp"
#include "zealotry/simulate.hpp"

#define ZEALOTRY_VERSION "0.1.0"
