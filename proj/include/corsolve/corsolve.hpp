#pragma once

#include "corsolve/bicgstab.hpp"
#include "corsolve/bicor.hpp"
#include "corsolve/core.hpp"
#include "corsolve/cors.hpp"
#include "corsolve/harness.hpp"
#include "corsolve/lanczos.hpp"
#include "corsolve/matrix_market.hpp"
#include "corsolve/precond.hpp"
#include "corsolve/projection.hpp"
#include "corsolve/solver_types.hpp"
#include "corsolve/testkit.hpp"
#include "corsolve/tridiagonal.hpp"
#include "corsolve/types.hpp"
