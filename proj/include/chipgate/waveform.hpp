#ifndef CHIPGATE_WAVEFORM_HPP
#define CHIPGATE_WAVEFORM_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "chipgate/grid.hpp"

namespace chipgate {

enum class WaveformUnit { dimensionless, angular_frequency };

/// Real-valued time series sampled at the nodes of a TimeGrid
/// (n_steps + 1 samples, endpoints included).
struct Waveform {
    TimeGrid grid;
    std::vector<double> values;
    WaveformUnit unit = WaveformUnit::dimensionless;

    Waveform() = default;
    Waveform(TimeGrid g, std::vector<double> v, WaveformUnit u = WaveformUnit::dimensionless)
        : grid(g), values(std::move(v)), unit(u) {
        if (values.size() != grid.n_samples())
            throw std::invalid_argument("waveform: sample count does not match time grid");
    }
    Waveform(TimeGrid g, double fill, WaveformUnit u = WaveformUnit::dimensionless)
        : grid(g), values(g.n_samples(), fill), unit(u) {}

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t k) const { return values[k]; }
    double& operator[](std::size_t k) { return values[k]; }

    /// Control value over propagation step k (midpoint of the two nodes).
    double midpoint(std::size_t k) const { return 0.5 * (values[k] + values[k + 1]); }

    /// Linear interpolation at arbitrary t, clamped to the grid span.
    double at(double t) const {
        const double dt = grid.dt();
        double s = (t - grid.t_start) / dt;
        s = std::clamp(s, 0.0, double(grid.n_steps));
        const std::size_t k = std::min(std::size_t(s), grid.n_steps - 1);
        const double f = s - double(k);
        return values[k] * (1.0 - f) + values[k + 1] * f;
    }

    Waveform& operator+=(const Waveform& o) {
        require_same_grid(o);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
        return *this;
    }
    Waveform& operator-=(const Waveform& o) {
        require_same_grid(o);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
        return *this;
    }
    Waveform& operator*=(double s) {
        for (double& v : values) v *= s;
        return *this;
    }
    Waveform clamped(double lo, double hi) const {
        Waveform out = *this;
        for (double& v : out.values) v = std::clamp(v, lo, hi);
        return out;
    }

    /// Trapezoidal integral over the full span.
    double integral() const {
        const double dt = grid.dt();
        double acc = 0.5 * (values.front() + values.back());
        for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
        return acc * dt;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::fabs(v));
        return m;
    }

  private:
    void require_same_grid(const Waveform& o) const {
        if (!(grid == o.grid)) throw std::invalid_argument("waveform: time grids differ");
    }
};

/// Triangular modulation: within each oscillation of length `period`, rises
/// linearly 0 -> 1 over the first half and falls back 1 -> 0 over the second.
inline double triangular_ramp_value(double t, double period) {
    if (period <= 0.0) throw std::invalid_argument("triangular_ramp_value: period must be positive");
    double frac = t / period - std::floor(t / period);
    // exact endpoints of the full waveform evaluate to zero
    if (t <= 0.0) frac = 0.0;
    return frac < 0.5 ? 2.0 * frac : 2.0 * (1.0 - frac);
}

/// Trial modulation lambda_0(t): n_oscillations triangular ramps covering the
/// time grid; one ramp per oscillation of the released state.
inline Waveform linear_ramp_trial(double period, std::size_t n_oscillations, const TimeGrid& grid) {
    if (period <= 0.0) throw std::invalid_argument("linear_ramp_trial: period must be positive");
    if (n_oscillations < 1) throw std::invalid_argument("linear_ramp_trial: need n_oscillations >= 1");
    const double expected = double(n_oscillations) * period;
    if (std::fabs(grid.duration() - expected) > 1e-9 * expected)
        throw std::invalid_argument("linear_ramp_trial: grid span must equal n_oscillations * period");
    Waveform wf(grid, 0.0, WaveformUnit::dimensionless);
    for (std::size_t k = 0; k < grid.n_samples(); ++k) {
        const double t = grid.t(k) - grid.t_start;
        // pin the terminal node to zero regardless of rounding
        wf.values[k] = (k == grid.n_steps) ? 0.0 : triangular_ramp_value(t, period);
    }
    return wf;
}

}  // namespace chipgate

#endif
