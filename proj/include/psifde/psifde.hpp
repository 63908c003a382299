#ifndef PSIFDE_PSIFDE_HPP
#define PSIFDE_PSIFDE_HPP

#include "psifde/config.hpp"
#include "psifde/expr.hpp"
#include "psifde/frac_integral.hpp"
#include "psifde/grid.hpp"
#include "psifde/hilfer.hpp"
#include "psifde/kernels.hpp"
#include "psifde/linear.hpp"
#include "psifde/mesh.hpp"
#include "psifde/monotone.hpp"
#include "psifde/psi.hpp"
#include "psifde/run.hpp"
#include "psifde/specfun.hpp"

#endif
