#pragma once

// Umbrella header: the whole library in one include.

#include "sapd/cli.hpp"
#include "sapd/config.hpp"
#include "sapd/dro.hpp"
#include "sapd/errors.hpp"
#include "sapd/harness.hpp"
#include "sapd/io.hpp"
#include "sapd/linalg.hpp"
#include "sapd/params.hpp"
#include "sapd/problem.hpp"
#include "sapd/projections.hpp"
#include "sapd/reference.hpp"
#include "sapd/rng.hpp"
#include "sapd/solvers.hpp"
#include "sapd/version.hpp"
#include "sapd/vr.hpp"
