#pragma once

#include "qot/dual.hpp"
#include "qot/errors.hpp"
#include "qot/hermitian.hpp"
#include "qot/io.hpp"
#include "qot/problem.hpp"
#include "qot/solver.hpp"
#include "qot/tensor.hpp"
