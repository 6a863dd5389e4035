#ifndef FRACSOLVE_HPP
#define FRACSOLVE_HPP

#include "fracsolve/charpoly.hpp"
#include "fracsolve/errors.hpp"
#include "fracsolve/fracderiv.hpp"
#include "fracsolve/pde.hpp"
#include "fracsolve/solutions.hpp"
#include "fracsolve/specfun.hpp"
#include "fracsolve/verify.hpp"

#endif // FRACSOLVE_HPP
