#pragma once

#include "levelk/belief.hpp"
#include "levelk/builtins.hpp"
#include "levelk/game.hpp"
#include "levelk/hierarchy.hpp"
#include "levelk/mdp.hpp"
#include "levelk/simulator.hpp"
