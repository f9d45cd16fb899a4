#ifndef HELMNYS_HELMNYS_HPP
#define HELMNYS_HELMNYS_HPP

#include "common.hpp"
#include "special.hpp"
#include "interpolation.hpp"
#include "geometry.hpp"
#include "kernel_split.hpp"
#include "product_quadrature.hpp"
#include "system.hpp"
#include "testbench.hpp"

#endif
