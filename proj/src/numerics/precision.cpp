#include "compop/numerics/precision.hpp"

#include "compop/error.hpp"

namespace compop::numerics {

Precision parse_precision(std::string_view name) {
  if (name == "double") return Precision::Double;
  if (name == "quad") return Precision::Quad;
  if (name == "extended") return Precision::Extended;
  throw ValidationError("unknown precision '" + std::string(name) +
                        "' (expected double, quad or extended)");
}

}  // namespace compop::numerics
