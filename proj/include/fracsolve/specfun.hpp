#ifndef FRACSOLVE_SPECFUN_HPP
#define FRACSOLVE_SPECFUN_HPP

#include "fracsolve/specfun/descriptor.hpp"
#include "fracsolve/specfun/evaluate.hpp"
#include "fracsolve/specfun/fox_h.hpp"
#include "fracsolve/specfun/gamma.hpp"
#include "fracsolve/specfun/series.hpp"

#endif // FRACSOLVE_SPECFUN_HPP
