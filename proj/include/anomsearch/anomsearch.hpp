#pragma once

#include "anomsearch/core_model.hpp"
#include "anomsearch/tsallis_omd.hpp"
#include "anomsearch/detectors.hpp"
#include "anomsearch/bounds.hpp"
#include "anomsearch/bayes_baseline.hpp"
#include "anomsearch/harness.hpp"
