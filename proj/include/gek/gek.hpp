#pragma once

#include "gek/numeric.hpp"
#include "gek/root_system.hpp"
#include "gek/iteration.hpp"
#include "gek/theory.hpp"
