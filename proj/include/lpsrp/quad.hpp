#pragma once

// Quadruple-precision scalar for the high-order accuracy studies. Include
// this before instantiating any lpsrp template on Quad.

#include <boost/multiprecision/float128.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace lpsrp {

using Quad = boost::multiprecision::float128;

}  // namespace lpsrp
