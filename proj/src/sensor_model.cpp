#include "sensor_model.hpp"

#include <algorithm>
#include <cmath>

namespace etroll {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Raised-cosine window: 1 inside the cell, handing over to the neighbour
// across a 2*crossfade band centered on each cell boundary.
double cell_gate(const SensorArrayLayout& lay, int j, double x) {
    const double lo = lay.cell_center(j) - lay.pitch_mm / 2.0;
    const double hi = lay.cell_center(j) + lay.pitch_mm / 2.0;
    const double xf = lay.crossfade_mm;
    const double up = (x - (lo - xf)) / (2.0 * xf);
    const double down = ((hi + xf) - x) / (2.0 * xf);
    const double f = std::clamp(std::min(up, down), 0.0, 1.0);
    return 0.5 - 0.5 * std::cos(kPi * f);
}
}  // namespace

void SensorArrayLayout::validate() const {
    if (physical_count < 2 || active_count < 1 ||
        active_offset + active_count > physical_count)
        throw std::invalid_argument("sensor layout window out of range");
    if (pitch_mm <= 0.0 || footprint_sigma_mm <= 0.0 || crossfade_mm <= 0.0)
        throw std::invalid_argument("sensor layout scales must be positive");
    if (std::abs(hole_offset_mm) >= pitch_mm / 2.0)
        throw std::invalid_argument("hole offset must stay inside the cell");
    for (int j = 1; j < physical_count; ++j)
        if (cell_center(j) <= cell_center(j - 1))
            throw std::invalid_argument("sensor positions must increase");
}

std::vector<double> cell_weights(const SensorArrayLayout& layout, double x) {
    std::vector<double> w(layout.physical_count, 0.0);
    double total = 0.0;
    for (int j = 0; j < layout.physical_count; ++j) {
        const double d = x - layout.hole_position(j);
        const double g = cell_gate(layout, j, x);
        if (g <= 0.0) continue;
        w[j] = g * std::exp(-d * d / (2.0 * layout.footprint_sigma_mm * layout.footprint_sigma_mm));
        total += w[j];
    }
    if (total <= 1e-12) {
        std::fill(w.begin(), w.end(), 0.0);
        return w;
    }
    for (double& v : w) v /= total;
    return w;
}

std::vector<double> raw_response(const SensorArrayLayout& layout, std::span<const LoadPatch> loads,
                                 std::span<const double> gains) {
    std::vector<double> out(layout.physical_count, 0.0);
    constexpr int kSegmentSamples = 33;
    for (const LoadPatch& load : loads) {
        if (load.force == 0.0) continue;
        if (load.a == load.b) {
            const auto w = cell_weights(layout, load.a);
            for (int j = 0; j < layout.physical_count; ++j) out[j] += load.force * w[j];
        } else {
            const double a = std::min(load.a, load.b), b = std::max(load.a, load.b);
            for (int i = 0; i < kSegmentSamples; ++i) {
                const double x = a + (b - a) * (i + 0.5) / kSegmentSamples;
                const auto w = cell_weights(layout, x);
                for (int j = 0; j < layout.physical_count; ++j)
                    out[j] += load.force / kSegmentSamples * w[j];
            }
        }
    }
    for (int j = 0; j < layout.physical_count; ++j) out[j] *= gains[j];
    return out;
}

CalibrationParams calibrate(std::span<const double> forces,
                            const std::vector<std::array<double, 3>>& readings) {
    if (forces.size() != 3) throw std::invalid_argument("calibration expects three weights");
    CalibrationParams out;
    const double fm = (forces[0] + forces[1] + forces[2]) / 3.0;
    double sxx = 0.0;
    for (double f : forces) sxx += (f - fm) * (f - fm);
    if (sxx <= 0.0) throw DegenerateFit("calibration weights are not distinct");
    for (const auto& r : readings) {
        if (!(r[0] < r[1] && r[1] < r[2]))
            throw DegenerateFit("channel readings do not increase with mass");
        const double rm = (r[0] + r[1] + r[2]) / 3.0;
        double sxy = 0.0;
        for (int i = 0; i < 3; ++i) sxy += (forces[i] - fm) * (r[i] - rm);
        const double slope = sxy / sxx;
        if (slope <= 0.0) throw DegenerateFit("non-positive calibration slope");
        out.slope.push_back(slope);
        out.offset.push_back(rm - slope * fm);
    }
    return out;
}

double contact_force(double torque_nm, double l_mm, double eps_mm) {
    if (l_mm <= eps_mm) throw SingularMomentArm("moment arm vanishes");
    return 1000.0 * torque_nm / l_mm;
}

SensorBank::SensorBank(const SensorModelParams& params) : params_(params) {
    params_.layout.validate();
    Rng rng(params_.gain_seed);
    gains_.resize(params_.layout.physical_count);
    for (double& g : gains_)
        g = params_.gain_center * (1.0 + params_.gain_jitter * (2.0 * rng.uniform() - 1.0));

    // Three-weight calibration run: each weight centered on each active cell.
    const double kGravity = 9.80665e-3;  // N per gram
    const std::array<double, 3> forces = {7.75 * kGravity, 19.04 * kGravity, 29.70 * kGravity};
    std::vector<std::array<double, 3>> readings(params_.layout.active_count);
    for (int k = 0; k < params_.layout.active_count; ++k) {
        for (int i = 0; i < 3; ++i) {
            const LoadPatch load{params_.layout.active_center(k), params_.layout.active_center(k),
                                 forces[i]};
            const auto raw = raw_response(params_.layout, std::span(&load, 1), gains_);
            readings[k][i] = raw[params_.layout.active_offset + k];
        }
    }
    calibration_ = calibrate(forces, readings);
}

std::vector<double> SensorBank::respond_calibrated(std::span<const LoadPatch> loads) const {
    const auto raw = raw_response(params_.layout, loads, gains_);
    std::vector<double> out(params_.layout.active_count);
    for (int k = 0; k < params_.layout.active_count; ++k) {
        const double r = raw[params_.layout.active_offset + k];
        const double force_est = (r - calibration_.offset[k]) / calibration_.slope[k];
        out[k] = force_est / params_.full_scale_force_n;
    }
    return out;
}

SensorFrame SensorBank::sense(std::span<const LoadPatch> loads, double timestamp,
                              Rng& noise) const {
    auto raw = raw_response(params_.layout, loads, gains_);
    SensorFrame frame;
    frame.timestamp = timestamp;
    frame.pressures.resize(params_.layout.active_count);
    for (int k = 0; k < params_.layout.active_count; ++k) {
        const int j = params_.layout.active_offset + k;
        const double raw_sigma =
            params_.noise_sigma * calibration_.slope[k] * params_.full_scale_force_n;
        const double noisy = raw[j] + noise.gaussian(0.0, raw_sigma);
        const double units =
            (noisy - calibration_.offset[k]) / calibration_.slope[k] / params_.full_scale_force_n;
        frame.pressures[k] = std::clamp(units, 0.0, params_.layout.saturation);
    }
    return frame;
}

}  // namespace etroll
