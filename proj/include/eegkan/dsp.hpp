#pragma once

#include "eegkan/dsp/bands.hpp"
#include "eegkan/dsp/butterworth.hpp"
#include "eegkan/dsp/filtfilt.hpp"
#include "eegkan/dsp/welch.hpp"
