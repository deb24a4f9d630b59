#pragma once

#include "gsl/error.hpp"
#include "gsl/formula.hpp"
#include "gsl/game.hpp"
#include "gsl/parity_game.hpp"
#include "gsl/posbool.hpp"
#include "gsl/automata.hpp"
#include "gsl/nondeterminize.hpp"
#include "gsl/compiler.hpp"
#include "gsl/checker.hpp"
#include "gsl/solution_concepts.hpp"
#include "gsl/oracle.hpp"
