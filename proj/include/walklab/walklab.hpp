#pragma once

#include "core.hpp"
#include "dynamics.hpp"
#include "eigen.hpp"
#include "ergodicity.hpp"
#include "expr.hpp"
#include "laurent.hpp"
#include "parallel.hpp"
#include "spectra.hpp"
#include "walk.hpp"
#include "zoo.hpp"
