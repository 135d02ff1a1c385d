#pragma once

#include "core.hpp"
#include "matrix_market.hpp"
#include "problem.hpp"
#include "shifted_solver.hpp"
#include "incremental_qr.hpp"
#include "residual.hpp"
#include "history.hpp"
#include "shifts.hpp"
#include "dense_oracle.hpp"
#include "ilrsi.hpp"
#include "rksm.hpp"
