#pragma once

#include "torus_ends/bq.hpp"
#include "torus_ends/character.hpp"
#include "torus_ends/ends.hpp"
#include "torus_ends/farey.hpp"
#include "torus_ends/parse_error.hpp"
#include "torus_ends/tau.hpp"
#include "torus_ends/trace_tree.hpp"
