#pragma once

#include "ktau/error.hpp"
#include "ktau/families.hpp"
#include "ktau/harness.hpp"
#include "ktau/rankcoef.hpp"
#include "ktau/rng.hpp"
#include "ktau/seqspec.hpp"
#include "ktau/stats.hpp"
#include "ktau/summation.hpp"
#include "ktau/theory.hpp"
