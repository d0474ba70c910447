// Umbrella header. Including it requires linking libpng (see png.hpp).
#pragma once

#include "rpm/core.hpp"
#include "rpm/dataset.hpp"
#include "rpm/generator.hpp"
#include "rpm/harness.hpp"
#include "rpm/induction.hpp"
#include "rpm/least_squares.hpp"
#include "rpm/parallel.hpp"
#include "rpm/perception.hpp"
#include "rpm/png.hpp"
#include "rpm/problem.hpp"
#include "rpm/random.hpp"
#include "rpm/raster.hpp"
#include "rpm/rules.hpp"
#include "rpm/solver.hpp"
