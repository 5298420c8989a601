#pragma once

// Convenience include for the whole library.

#include "qfslab/bounds.hpp"
#include "qfslab/covering.hpp"
#include "qfslab/experiment.hpp"
#include "qfslab/logscale.hpp"
#include "qfslab/nets.hpp"
#include "qfslab/permgroup.hpp"
#include "qfslab/qfs.hpp"
#include "qfslab/relunet.hpp"
#include "qfslab/rng.hpp"
