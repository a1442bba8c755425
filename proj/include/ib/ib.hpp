#pragma once

#include "ib/grid.hpp"
#include "ib/interpolate.hpp"
#include "ib/kernel.hpp"
#include "ib/reduce.hpp"
#include "ib/sort.hpp"
#include "ib/spread.hpp"
#include "ib/stats.hpp"
