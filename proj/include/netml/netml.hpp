#pragma once

// Convenience umbrella: the full library.

#include <netml/adaptive.hpp>
#include <netml/common.hpp>
#include <netml/divergence.hpp>
#include <netml/experiment.hpp>
#include <netml/fit.hpp>
#include <netml/graphon.hpp>
#include <netml/io.hpp>
#include <netml/oracle.hpp>
#include <netml/rng.hpp>
#include <netml/sampling.hpp>
#include <netml/sym_matrix.hpp>
