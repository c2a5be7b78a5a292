#pragma once

#include "eegkan/dataset.hpp"
#include "eegkan/dsp.hpp"
#include "eegkan/experiment.hpp"
#include "eegkan/nn.hpp"
#include "eegkan/report/svg.hpp"
#include "eegkan/stats/ols.hpp"
