#pragma once

#include "isp/bandwidth.hpp"
#include "isp/csv.hpp"
#include "isp/errors.hpp"
#include "isp/experiments.hpp"
#include "isp/forward_model.hpp"
#include "isp/geometry.hpp"
#include "isp/quadrature.hpp"
#include "isp/scaled.hpp"
#include "isp/singular_system.hpp"
#include "isp/specfun.hpp"
#include "isp/tsvd.hpp"
