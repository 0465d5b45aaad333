#pragma once

#include "mkdual/approx.hpp"
#include "mkdual/couplings.hpp"
#include "mkdual/errors.hpp"
#include "mkdual/matrix.hpp"
#include "mkdual/measure.hpp"
#include "mkdual/rectangles.hpp"
#include "mkdual/scalar.hpp"
#include "mkdual/simplex.hpp"
#include "mkdual/transport.hpp"
#include "mkdual/wasserstein.hpp"
