// Umbrella header: the whole library plus the experiment harness.
#ifndef QBL_QBL_HPP
#define QBL_QBL_HPP

#include "qbl/numkernel.hpp"
#include "qbl/lp.hpp"
#include "qbl/spaces.hpp"
#include "qbl/geometry.hpp"
#include "qbl/interpolation.hpp"
#include "qbl/randsigns.hpp"
#include "qbl/factorization.hpp"
#include "qbl/sidon.hpp"
#include "qbl/harness/config.hpp"
#include "qbl/harness/report.hpp"
#include "qbl/harness/experiments.hpp"

#endif // QBL_QBL_HPP
