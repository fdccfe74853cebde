#pragma once

#include "icregion/channel.hpp"
#include "icregion/conditions.hpp"
#include "icregion/errors.hpp"
#include "icregion/info_metrics.hpp"
#include "icregion/json_io.hpp"
#include "icregion/region.hpp"
#include "icregion/rng.hpp"
#include "icregion/scheme.hpp"
#include "icregion/verify.hpp"
