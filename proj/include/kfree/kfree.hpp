// kfree.hpp
// Umbrella header for the kfree library (everything except report.hpp, which
// pulls in nlohmann/json).

#pragma once

#include "analytic.hpp"
#include "characters.hpp"
#include "coefficients.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "parallel.hpp"
#include "sequence.hpp"
#include "sieve.hpp"
