#pragma once

#include "eegkan/experiment/confusion.hpp"
#include "eegkan/experiment/sweep.hpp"
