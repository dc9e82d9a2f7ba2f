#include "fieldroad/grid.hpp"

#include <cmath>

#include "fieldroad/errors.hpp"

namespace fieldroad {

void validate(const GridSpec& spec) {
    if (!std::isfinite(spec.x_min) || !std::isfinite(spec.x_max) || !std::isfinite(spec.y_min) ||
        !std::isfinite(spec.y_max)) {
        throw ConfigError("grid bounds must be finite");
    }
    if (!(spec.x_min < spec.x_max)) throw ConfigError("grid needs x_min < x_max");
    if (!(spec.y_min >= 0.0)) throw ConfigError("grid needs y_min >= 0");
    if (!(spec.y_min < spec.y_max)) throw ConfigError("grid needs y_min < y_max");
    if (spec.nx < 2 || spec.ny < 2) throw ConfigError("grid needs at least 2 samples per axis");
}

std::string to_string(Quantity quantity) {
    switch (quantity) {
        case Quantity::PhiStar: return "phi_star";
        case Quantity::V: return "v";
        case Quantity::PdeIterate: return "pde_iterate";
    }
    return "unknown";
}

}  // namespace fieldroad
