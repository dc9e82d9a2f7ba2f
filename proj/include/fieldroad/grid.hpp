#pragma once

// Uniform tensor grids on a window of the closed upper half-plane and the
// scalar fields sampled on them.

#include <cstddef>
#include <string>
#include <vector>

namespace fieldroad {

struct GridSpec {
    double x_min = -5.0;
    double x_max = 25.0;
    double y_min = 0.0;
    double y_max = 12.0;
    std::size_t nx = 800;
    std::size_t ny = 400;

    double dx() const noexcept { return (x_max - x_min) / static_cast<double>(nx - 1); }
    double dy() const noexcept { return (y_max - y_min) / static_cast<double>(ny - 1); }
    double x(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * dx(); }
    double y(std::size_t j) const noexcept { return y_min + static_cast<double>(j) * dy(); }
    std::size_t size() const noexcept { return nx * ny; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws ConfigError on an empty or inverted window, y_min < 0 or fewer
/// than two samples per axis.
void validate(const GridSpec& spec);

enum class Quantity { PhiStar, V, PdeIterate };

std::string to_string(Quantity quantity);

struct PoisonedCell {
    std::size_t i = 0;
    std::size_t j = 0;
    std::string kind;
    std::string message;
};

/// Row-major samples: values[j * nx + i] is the value at (x_i, y_j).
/// Cells whose evaluation failed hold NaN and are listed in `poisoned`.
struct ScalarField {
    GridSpec spec;
    std::vector<double> values;
    Quantity quantity = Quantity::PhiStar;
    std::vector<PoisonedCell> poisoned;

    ScalarField() = default;
    ScalarField(const GridSpec& s, Quantity q, double fill = 0.0)
        : spec(s), values(s.size(), fill), quantity(q) {}

    double& at(std::size_t i, std::size_t j) { return values[j * spec.nx + i]; }
    double at(std::size_t i, std::size_t j) const { return values[j * spec.nx + i]; }
};

}  // namespace fieldroad
