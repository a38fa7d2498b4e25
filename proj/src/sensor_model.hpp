#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace etroll {

struct DegenerateFit : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularMomentArm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Barometric array geometry along the sensing finger. Twelve physical cells;
// only the middle ten are reported (the outermost pair stands in for the
// faulty edge sensors). Each cell's sensitive hole sits off-center, which is
// what makes the response asymmetric within a cell.
struct SensorArrayLayout {
    int physical_count = 12;
    int active_offset = 1;
    int active_count = 10;
    double pitch_mm = 8.0;
    double center_mm = 85.0;        // array midpoint along the finger
    double hole_offset_mm = 1.5;
    double footprint_sigma_mm = 3.0;
    double crossfade_mm = 1.5;      // width of the cell-boundary handover
    double saturation = 1.0;

    double cell_center(int j) const {
        return center_mm + (j - (physical_count - 1) / 2.0) * pitch_mm;
    }
    double hole_position(int j) const { return cell_center(j) + hole_offset_mm; }
    double active_center(int k) const { return cell_center(active_offset + k); }
    void validate() const;
};

// A patch of normal load on the finger: uniform over [a, b], or a point load
// when a == b. Force in newtons, positions in mm from the joint.
struct LoadPatch {
    double a = 0.0;
    double b = 0.0;
    double force = 0.0;
};

struct SensorFrame {
    double timestamp = 0.0;
    std::vector<double> pressures;  // calibrated units, one per active channel
};

struct CalibrationParams {
    std::vector<double> slope;   // raw units per newton
    std::vector<double> offset;  // raw units
};

// Per-cell share of a point load at x. Shares sum to 1 in the array interior
// and fall to 0 beyond the outermost cells.
std::vector<double> cell_weights(const SensorArrayLayout& layout, double x);

// Noise-free raw readings for a set of load patches, one per physical cell.
std::vector<double> raw_response(const SensorArrayLayout& layout, std::span<const LoadPatch> loads,
                                 std::span<const double> gains);

// Least-squares linear fit of raw reading against applied force, per channel.
// readings[k][i] pairs with forces[i]. Throws DegenerateFit when a channel's
// readings do not increase with mass.
CalibrationParams calibrate(std::span<const double> forces,
                            const std::vector<std::array<double, 3>>& readings);

// Moment-arm force map: torque (N*m) applied at distance l (mm) down the finger.
double contact_force(double torque_nm, double l_mm, double eps_mm = 1e-3);

struct SensorModelParams {
    SensorArrayLayout layout;
    double noise_sigma = 0.01;        // calibrated units, added pre-calibration
    double full_scale_force_n = 17.5; // force that reads 1.0 after calibration
    double gain_center = 0.07;        // raw units per newton
    double gain_jitter = 0.15;        // relative spread of per-cell gains
    std::uint64_t gain_seed = 12345;
};

// The synthetic array: per-cell gains drawn once from the gain seed, calibrated
// with the three-weight procedure, producing frames in calibrated units.
class SensorBank {
public:
    explicit SensorBank(const SensorModelParams& params);

    const CalibrationParams& calibration() const { return calibration_; }
    const SensorModelParams& params() const { return params_; }

    // Calibrated, noise-free channel values.
    std::vector<double> respond_calibrated(std::span<const LoadPatch> loads) const;

    SensorFrame sense(std::span<const LoadPatch> loads, double timestamp, Rng& noise) const;

private:
    SensorModelParams params_;
    std::vector<double> gains_;
    CalibrationParams calibration_;
};

}  // namespace etroll
