#pragma once

#include "egonet/common.hpp"
#include "egonet/community.hpp"
#include "egonet/curves.hpp"
#include "egonet/features.hpp"
#include "egonet/graph.hpp"
#include "egonet/ingest.hpp"
#include "egonet/manifest.hpp"
#include "egonet/model.hpp"
#include "egonet/orderstats.hpp"
#include "egonet/overlap.hpp"
#include "egonet/parallel.hpp"
#include "egonet/rng.hpp"
#include "egonet/store.hpp"
#include "egonet/synth.hpp"
#include "egonet/version.hpp"
