#pragma once

#include "svcp/rational.hpp"
#include "svcp/domain.hpp"
#include "svcp/builder.hpp"
#include "svcp/feasibility.hpp"
#include "svcp/objectives.hpp"
#include "svcp/heuristic.hpp"
#include "svcp/oracle.hpp"
#include "svcp/random_instance.hpp"
#include "svcp/halle_catalog.hpp"
#include "svcp/scenario.hpp"
#include "svcp/io.hpp"
