#pragma once

#include "ball.hpp"
#include "cutting.hpp"
#include "export.hpp"
#include "flow.hpp"
#include "io.hpp"
#include "strata.hpp"
#include "torus.hpp"
#include "trace.hpp"
#include "verify.hpp"
#include "walls.hpp"
