#pragma once

#include "schrocon/errors.hpp"
#include "schrocon/grid.hpp"
#include "schrocon/state.hpp"
#include "schrocon/transform.hpp"
#include "schrocon/window.hpp"
#include "schrocon/spectral_ops.hpp"
#include "schrocon/random_state.hpp"
#include "schrocon/quadrature.hpp"
#include "schrocon/krylov.hpp"
#include "schrocon/gramian.hpp"
#include "schrocon/hum.hpp"
#include "schrocon/resolvent.hpp"
#include "schrocon/tensor.hpp"
#include "schrocon/nls.hpp"
#include "schrocon/nls_control.hpp"
#include "schrocon/io.hpp"
#include "schrocon/config.hpp"
