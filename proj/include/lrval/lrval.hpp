#pragma once
// Umbrella header for the whole library.

#include "field.hpp"
#include "matrix.hpp"
#include "filling.hpp"
#include "generic.hpp"
#include "extract.hpp"
#include "dynamics.hpp"
#include "render.hpp"
