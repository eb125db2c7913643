#include "swof/friction.hpp"

#include <string>

#include "swof/errors.hpp"

namespace swof {

FrictionKind parse_friction_kind(std::string_view name) {
  if (name == "none") {
    return FrictionKind::none;
  }
  if (name == "darcy-weisbach") {
    return FrictionKind::darcy_weisbach;
  }
  if (name == "manning") {
    return FrictionKind::manning;
  }
  throw ConfigError("unknown friction law '" + std::string(name) +
                    "' (expected darcy-weisbach, manning or none)");
}

std::string_view to_string(FrictionKind kind) {
  switch (kind) {
    case FrictionKind::darcy_weisbach:
      return "darcy-weisbach";
    case FrictionKind::manning:
      return "manning";
    case FrictionKind::none:
      break;
  }
  return "none";
}

}  // namespace swof
