#pragma once

#include "steinerlab/config_space.hpp"
#include "steinerlab/geometry.hpp"
#include "steinerlab/homotopy.hpp"
#include "steinerlab/local_min.hpp"
#include "steinerlab/melzak.hpp"
#include "steinerlab/moustache.hpp"
#include "steinerlab/smt.hpp"
#include "steinerlab/topology.hpp"
