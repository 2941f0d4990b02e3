#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace compop::numerics {

// Precision ladder for pencil solves: hardware double, then 113- and 237-bit
// software floats.
enum class Precision { Double, Quad, Extended };

using quad_float = boost::multiprecision::cpp_bin_float_quad;
using extended_float = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<237, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

inline std::string_view to_string(Precision p) {
  switch (p) {
    case Precision::Double: return "double";
    case Precision::Quad: return "quad";
    case Precision::Extended: return "extended";
  }
  return "double";
}

Precision parse_precision(std::string_view name);

inline int mantissa_bits(Precision p) {
  switch (p) {
    case Precision::Double: return 53;
    case Precision::Quad: return 113;
    case Precision::Extended: return 237;
  }
  return 53;
}

}  // namespace compop::numerics
