#pragma once

#include "disclab/discrepancy.hpp"
#include "disclab/error.hpp"
#include "disclab/h2_moments.hpp"
#include "disclab/harness.hpp"
#include "disclab/hypergraph.hpp"
#include "disclab/io.hpp"
#include "disclab/partial_coloring.hpp"
#include "disclab/rng.hpp"
#include "disclab/spectral.hpp"
#include "disclab/two_stage.hpp"
