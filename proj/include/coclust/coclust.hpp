#pragma once

#include "coclust/cocluster.hpp"
#include "coclust/fit.hpp"
#include "coclust/io.hpp"
#include "coclust/kernels.hpp"
#include "coclust/partition.hpp"
#include "coclust/risk.hpp"
#include "coclust/types.hpp"
