#pragma once

#include "netsel/classifier.hpp"
#include "netsel/core.hpp"
#include "netsel/csv.hpp"
#include "netsel/error.hpp"
#include "netsel/evaluation.hpp"
#include "netsel/features.hpp"
#include "netsel/frontier.hpp"
#include "netsel/image_io.hpp"
#include "netsel/ingest.hpp"
#include "netsel/oracle.hpp"
#include "netsel/parallel.hpp"
#include "netsel/pca.hpp"
#include "netsel/reactive.hpp"
#include "netsel/rng.hpp"
#include "netsel/svg.hpp"
