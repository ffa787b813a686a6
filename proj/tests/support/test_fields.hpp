#pragma once

#include "neumann/field.hpp"

#include <string>

namespace neumann::fixtures {

inline std::string data_path(const std::string& name) { return std::string(NEUMANN_DATA_DIR) + "/" + name; }

// cos x + cos y
inline MorseField separable() { return MorseField({{1.0, 1, 0, 0.0}, {1.0, 0, 1, 0.0}}); }

// cos(x + 4y) + 0.6 cos(4x - y)
inline MorseField lambda17() { return MorseField({{1.0, 1, 4, 0.0}, {0.6, 4, -1, 0.0}}); }

// Four-mode lambda = 17 field without the symmetries of lambda17(); it has
// confirmed cusps.
inline MorseField lambda17_generic() {
  return MorseField({{1.0, 1, 4, 0.0}, {0.6, 4, -1, 0.0}, {0.7, 4, 1, 0.3}, {0.4, 1, -4, 1.1}});
}

}  // namespace neumann::fixtures
