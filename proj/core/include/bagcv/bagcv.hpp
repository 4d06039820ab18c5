#pragma once

#include "bagcv/amse.hpp"
#include "bagcv/bagging.hpp"
#include "bagcv/constants_file.hpp"
#include "bagcv/cv.hpp"
#include "bagcv/density.hpp"
#include "bagcv/em.hpp"
#include "bagcv/error.hpp"
#include "bagcv/experiments.hpp"
#include "bagcv/json_io.hpp"
#include "bagcv/kernel.hpp"
#include "bagcv/power_law.hpp"
#include "bagcv/quadrature.hpp"
#include "bagcv/rng.hpp"
#include "bagcv/sample.hpp"
#include "bagcv/version.hpp"
