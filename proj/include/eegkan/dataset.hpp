#pragma once

#include "eegkan/dataset/dataset.hpp"
#include "eegkan/dataset/features.hpp"
#include "eegkan/dataset/recording.hpp"
#include "eegkan/dataset/synth.hpp"
