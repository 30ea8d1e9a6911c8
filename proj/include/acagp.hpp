#pragma once

#include <acagp/errors.hpp>
#include <acagp/experiments.hpp>
#include <acagp/geometric_pivots.hpp>
#include <acagp/geometry.hpp>
#include <acagp/io.hpp>
#include <acagp/kernel.hpp>
#include <acagp/lowrank.hpp>
#include <acagp/oracle.hpp>
#include <acagp/rng.hpp>
#include <acagp/version.hpp>
