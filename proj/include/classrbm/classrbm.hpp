#pragma once

// Classification restricted Boltzmann machine: exact closed-form prediction,
// relevant-input discovery, and contrastive-divergence training under
// randomized parameter masking, with brute-force reference implementations
// for validation on small instances.

#include "classrbm/data.hpp"
#include "classrbm/dropping.hpp"
#include "classrbm/error.hpp"
#include "classrbm/eval.hpp"
#include "classrbm/fixtures.hpp"
#include "classrbm/gradient.hpp"
#include "classrbm/matrix.hpp"
#include "classrbm/model.hpp"
#include "classrbm/numerics.hpp"
#include "classrbm/oracle.hpp"
#include "classrbm/relevance.hpp"
#include "classrbm/rng.hpp"
#include "classrbm/serialize.hpp"
#include "classrbm/training.hpp"
