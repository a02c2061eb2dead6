#ifndef SJJ_SJJ_HPP
#define SJJ_SJJ_HPP

#include "approx.hpp"
#include "dynamics.hpp"
#include "functionals.hpp"
#include "io.hpp"
#include "metrology.hpp"
#include "model.hpp"
#include "quadrature.hpp"
#include "steady.hpp"
#include "util.hpp"

#endif
