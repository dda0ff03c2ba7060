#pragma once

#include "vidalign/align.hpp"
#include "vidalign/error.hpp"
#include "vidalign/eval.hpp"
#include "vidalign/experiments.hpp"
#include "vidalign/features.hpp"
#include "vidalign/formats.hpp"
#include "vidalign/matrix.hpp"
#include "vidalign/parallel.hpp"
#include "vidalign/random.hpp"
#include "vidalign/series.hpp"
#include "vidalign/synth.hpp"
