#include <doctest.h>

#include "corsolve/corsolve.hpp"
#include "test_helpers.hpp"
