#pragma once

// Umbrella header for the affordance-map learning library.

#include "affmap/cmm/classifier.hpp"
#include "affmap/cmm/serialization.hpp"
#include "affmap/explore/choice_map.hpp"
#include "affmap/explore/loop.hpp"
#include "affmap/explore/uncertainty.hpp"
#include "affmap/maps/affordance.hpp"
#include "affmap/maps/relevance.hpp"
#include "affmap/metrics/metrics.hpp"
#include "affmap/percept/cloud.hpp"
#include "affmap/percept/features.hpp"
#include "affmap/percept/render.hpp"
#include "affmap/percept/segment.hpp"
#include "affmap/percept/spfh.hpp"
#include "affmap/runner/experiment.hpp"
#include "affmap/sim/primitives.hpp"
#include "affmap/sim/scene.hpp"
#include "affmap/stats/fisher.hpp"
#include "affmap/stats/gaussian.hpp"
