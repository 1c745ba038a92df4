#pragma once

// Convenience include for the whole library.

#include "destsim/cooccurrence.hpp"
#include "destsim/core.hpp"
#include "destsim/eval.hpp"
#include "destsim/ingest.hpp"
#include "destsim/interaction.hpp"
#include "destsim/io.hpp"
#include "destsim/measures.hpp"
#include "destsim/recommend.hpp"
#include "destsim/rng.hpp"
#include "destsim/synth.hpp"
#include "destsim/time.hpp"
