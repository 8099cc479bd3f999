// telesim.hpp
// Umbrella header.

#pragma once

#include "telesim/experiments.hpp"
#include "telesim/infotheory.hpp"
#include "telesim/prefix_code.hpp"
#include "telesim/qcore.hpp"
#include "telesim/rng.hpp"
#include "telesim/teleport.hpp"
#include "telesim/transcript_io.hpp"
