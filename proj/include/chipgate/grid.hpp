#ifndef CHIPGATE_GRID_HPP
#define CHIPGATE_GRID_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "chipgate/constants.hpp"

namespace chipgate {

/// Uniform 1D spatial grid. n_points is a power of two so reciprocal-space
/// transforms stay cheap and exact.
struct SpatialGrid1D {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n_points = 0;

    double spacing() const { return (x_max - x_min) / double(n_points - 1); }
    double x(std::size_t i) const { return x_min + double(i) * spacing(); }

    std::vector<double> points() const {
        std::vector<double> xs(n_points);
        for (std::size_t i = 0; i < n_points; ++i) xs[i] = x(i);
        return xs;
    }

    /// FFT-ordered angular wavenumbers for the periodic extension of the grid.
    /// Period L = n*spacing (one spacing beyond x_max-x_min).
    std::vector<double> wavenumbers() const {
        const std::size_t n = n_points;
        const double dk = 2.0 * pi / (double(n) * spacing());
        std::vector<double> ks(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double idx = (i < n / 2) ? double(i) : double(i) - double(n);
            ks[i] = idx * dk;
        }
        return ks;
    }
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline SpatialGrid1D make_grid(double x_min, double x_max, std::size_t n) {
    if (!(x_max > x_min)) throw std::invalid_argument("make_grid: x_max must exceed x_min");
    if (n < 8) throw std::invalid_argument("make_grid: need at least 8 points");
    if (!is_power_of_two(n)) throw std::invalid_argument("make_grid: n_points must be a power of two");
    return SpatialGrid1D{x_min, x_max, n};
}

/// Uniform time grid with n_steps intervals; sample nodes are t_start + k*dt,
/// k = 0..n_steps inclusive.
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t n_steps = 0;

    double dt() const { return (t_end - t_start) / double(n_steps); }
    std::size_t n_samples() const { return n_steps + 1; }
    double t(std::size_t k) const { return t_start + double(k) * dt(); }
    double duration() const { return t_end - t_start; }

    bool operator==(const TimeGrid&) const = default;
};

inline TimeGrid make_time_grid(double t_start, double t_end, std::size_t n_steps) {
    if (!(t_end > t_start)) throw std::invalid_argument("make_time_grid: t_end must exceed t_start");
    if (n_steps == 0) throw std::invalid_argument("make_time_grid: need at least one step");
    return TimeGrid{t_start, t_end, n_steps};
}

}  // namespace chipgate

#endif
