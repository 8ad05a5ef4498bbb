#pragma once

#include "error.hpp"
#include "parallel.hpp"
#include "text.hpp"
#include "corpus.hpp"
#include "sense.hpp"
#include "graph.hpp"
#include "walktrap.hpp"
#include "evt.hpp"
#include "regression.hpp"
#include "temporal.hpp"
#include "digest.hpp"
#include "artifact.hpp"
#include "synth.hpp"
#include "pipeline.hpp"
