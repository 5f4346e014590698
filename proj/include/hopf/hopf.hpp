#ifndef HOPF_HOPF_HPP
#define HOPF_HOPF_HPP

#include "hopf/bendixson.hpp"
#include "hopf/global.hpp"
#include "hopf/integrate.hpp"
#include "hopf/mat3.hpp"
#include "hopf/model.hpp"
#include "hopf/orbits.hpp"
#include "hopf/report.hpp"
#include "hopf/spectral.hpp"

#endif  // HOPF_HOPF_HPP
