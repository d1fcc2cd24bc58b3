#pragma once

// Umbrella header for the estimation library. The experiment harness and CLI
// live under parachain/harness/ and are included separately.

#include "parachain/chain.hpp"
#include "parachain/diagnostics.hpp"
#include "parachain/distributions.hpp"
#include "parachain/errors.hpp"
#include "parachain/estimators.hpp"
#include "parachain/matrix.hpp"
#include "parachain/rng.hpp"
#include "parachain/samplers.hpp"
