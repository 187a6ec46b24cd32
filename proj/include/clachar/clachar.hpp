#pragma once

#include "clachar/characterizer.hpp"
#include "clachar/cla_builder.hpp"
#include "clachar/cnt_geometry.hpp"
#include "clachar/dynamic_mapper.hpp"
#include "clachar/dynamic_netlist.hpp"
#include "clachar/error.hpp"
#include "clachar/sim_engine.hpp"
#include "clachar/tech_models.hpp"
