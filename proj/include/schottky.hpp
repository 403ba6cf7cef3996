#pragma once

#include "schottky/numerics.hpp"
#include "schottky/matrix.hpp"
#include "schottky/polynomial.hpp"
#include "schottky/groups.hpp"
#include "schottky/reps.hpp"
#include "schottky/cohomology.hpp"
#include "schottky/schottky.hpp"
#include "schottky/json_io.hpp"
