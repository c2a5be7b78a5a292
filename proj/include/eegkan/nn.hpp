#pragma once

#include "eegkan/nn/adam.hpp"
#include "eegkan/nn/bspline.hpp"
#include "eegkan/nn/checkpoint.hpp"
#include "eegkan/nn/loss.hpp"
#include "eegkan/nn/model.hpp"
#include "eegkan/nn/spec.hpp"
#include "eegkan/nn/train.hpp"
