#pragma once

#include "siddmd/matdecomp.hpp"
#include "siddmd/embedding.hpp"
#include "siddmd/lowrank.hpp"
#include "siddmd/sysid.hpp"
#include "siddmd/baselines.hpp"
#include "siddmd/equivalence.hpp"
