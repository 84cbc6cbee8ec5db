#pragma once

#include "error_density.hpp"
#include "errors.hpp"
#include "kernels.hpp"
#include "profile_likelihood.hpp"
#include "report_io.hpp"
#include "rng.hpp"
#include "silverman.hpp"
#include "simulation.hpp"
#include "smoothing.hpp"
#include "transforms.hpp"
