#pragma once

#include "clinch/rational.hpp"
#include "clinch/core.hpp"
#include "clinch/flowmatch.hpp"
#include "clinch/engine.hpp"
#include "clinch/verifier.hpp"
#include "clinch/oracle.hpp"
#include "clinch/io.hpp"
#include "clinch/generate.hpp"
#include "clinch/fuzz.hpp"
#include "clinch/commands.hpp"
