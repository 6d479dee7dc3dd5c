#pragma once

// Everything in one include.

#include "hk/scalar.hpp"
#include "hk/core.hpp"
#include "hk/one_dim.hpp"
#include "hk/noisy.hpp"
#include "hk/analysis.hpp"
#include "hk/instances.hpp"
#include "hk/monitors.hpp"
#include "hk/io.hpp"
#include "hk/verify.hpp"
