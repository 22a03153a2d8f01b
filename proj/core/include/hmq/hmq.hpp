#pragma once

#include "hmq/detector.hpp"
#include "hmq/experiment.hpp"
#include "hmq/exponent.hpp"
#include "hmq/likelihood.hpp"
#include "hmq/model.hpp"
#include "hmq/numerics.hpp"
#include "hmq/quantized_likelihood.hpp"
#include "hmq/quantizer.hpp"
#include "hmq/rng.hpp"
#include "hmq/version.hpp"
