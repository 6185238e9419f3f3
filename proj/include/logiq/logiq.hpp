#pragma once

#include "logiq/augmentation.hpp"
#include "logiq/brute_force.hpp"
#include "logiq/dnnf.hpp"
#include "logiq/error.hpp"
#include "logiq/graph.hpp"
#include "logiq/logic.hpp"
#include "logiq/mso_compiler.hpp"
#include "logiq/predicate.hpp"
#include "logiq/report.hpp"
#include "logiq/solver_bddexp.hpp"
#include "logiq/solver_lowdeg.hpp"
#include "logiq/solver_mso.hpp"
#include "logiq/submodular.hpp"
#include "logiq/tree_decomposition.hpp"
