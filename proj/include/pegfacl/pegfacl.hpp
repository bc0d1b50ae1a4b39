#pragma once

#include "pegfacl/geometry.hpp"
#include "pegfacl/env.hpp"
#include "pegfacl/fuzzy.hpp"
#include "pegfacl/facl.hpp"
#include "pegfacl/reward.hpp"
#include "pegfacl/config.hpp"
#include "pegfacl/episode.hpp"
#include "pegfacl/io.hpp"
#include "pegfacl/harness.hpp"
