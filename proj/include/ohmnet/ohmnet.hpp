#pragma once

#include "ohmnet/alias.hpp"
#include "ohmnet/classifier.hpp"
#include "ohmnet/embedding.hpp"
#include "ohmnet/error.hpp"
#include "ohmnet/evaluation.hpp"
#include "ohmnet/graph.hpp"
#include "ohmnet/io.hpp"
#include "ohmnet/metrics.hpp"
#include "ohmnet/parallel.hpp"
#include "ohmnet/rng.hpp"
#include "ohmnet/synth.hpp"
#include "ohmnet/walks.hpp"

namespace ohmnet {
inline constexpr const char* version = "0.1.0";
}
