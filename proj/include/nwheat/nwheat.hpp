#pragma once

// Umbrella header: certified evaluation, differentiation, and inequality
// replay for three explicit heat-equation solutions that are smooth but
// nowhere analytic in time.

#include "nwheat/ball.hpp"
#include "nwheat/derivatives.hpp"
#include "nwheat/envelope.hpp"
#include "nwheat/exact_real.hpp"
#include "nwheat/heat_kernel.hpp"
#include "nwheat/numeric_env.hpp"
#include "nwheat/proof_replay.hpp"
#include "nwheat/rational_enum.hpp"
#include "nwheat/refine.hpp"
#include "nwheat/report.hpp"
#include "nwheat/residual.hpp"
#include "nwheat/signed_log.hpp"
#include "nwheat/solutions.hpp"
#include "nwheat/walczak.hpp"
