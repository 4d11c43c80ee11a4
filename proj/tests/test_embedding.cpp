#include <doctest.h>
#include <og6lat/lattice.hpp>
