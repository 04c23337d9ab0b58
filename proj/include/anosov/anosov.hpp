#pragma once

// Everything in one include.

#include "anosov/config.hpp"
#include "anosov/counter_rng.hpp"
#include "anosov/errors.hpp"
#include "anosov/ks_entropy.hpp"
#include "anosov/linalg.hpp"
#include "anosov/observability.hpp"
#include "anosov/parallel.hpp"
#include "anosov/partition.hpp"
#include "anosov/propagator.hpp"
#include "anosov/quantization.hpp"
#include "anosov/quantum_entropy.hpp"
#include "anosov/runner.hpp"
#include "anosov/selftest.hpp"
#include "anosov/semiclassical.hpp"
#include "anosov/thermodynamics.hpp"
#include "anosov/toral_map.hpp"
#include "anosov/trig_polynomial.hpp"
