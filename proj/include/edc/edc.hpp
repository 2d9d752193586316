// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "edc/detector.hpp"
#include "edc/model.hpp"
#include "edc/optimizer.hpp"
#include "edc/simulator.hpp"
#include "edc/types.hpp"
