#pragma once

// Bernoulli-Laplace urn chains: exact kernels, stationary laws, total
// variation mixing times, spectral cutoff predictors, path coupling and
// discrete-normal comparisons, over a float or an exact-rational backend.

#include "blmix/coupling.hpp"
#include "blmix/dn_approx.hpp"
#include "blmix/errors.hpp"
#include "blmix/hypergeom.hpp"
#include "blmix/kernel.hpp"
#include "blmix/mixing.hpp"
#include "blmix/parallel.hpp"
#include "blmix/params.hpp"
#include "blmix/prob_vector.hpp"
#include "blmix/rng.hpp"
#include "blmix/spectral.hpp"
#include "blmix/sweep.hpp"
#include "blmix/table_io.hpp"
