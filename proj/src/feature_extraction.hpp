#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace etroll {

struct SeriesTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroWidthPeak : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Centered moving average with shrinking windows at the edges; output length
// equals input length.
std::vector<double> smooth(std::span<const double> series, int window = 20);

struct Peak {
    double start = 0.0;      // s, first rise above threshold
    double end = 0.0;        // s, first drop below threshold
    double ttp = 0.0;        // s, time at the peak value
    double amplitude = 0.0;
    int start_index = 0;
    int end_index = 0;       // one past the last above-threshold sample (clamped)
    int peak_index = 0;
};

// Threshold segmentation: T = max(abs_floor, rel_fraction * channel max).
// A peak is a maximal run of samples >= T containing at least one sample > T;
// plateaus at exactly T belong to the peak.
std::vector<Peak> detect_peaks(std::span<const double> series, std::span<const double> times,
                               double abs_floor = 0.05, double rel_fraction = 0.2);

// 100 * (temporal midpoint - ttp) / width; negative when the maximum is late.
double skewness(double start, double end, double ttp);

struct FeatureVector {
    static constexpr int kChannels = 10;
    static constexpr int kSlots = 2;
    static constexpr int kPerPeak = 4;  // amplitude, ttp, width, skewness
    static constexpr int kSize = kChannels * kSlots * kPerPeak;

    std::array<double, kSize> values{};
    std::string label;

    static int index(int channel, int slot, int feature) {
        return channel * kSlots * kPerPeak + slot * kPerPeak + feature;
    }
};

// Per channel keep the two largest peaks (ties to the earlier ttp), reorder by
// ttp, zero-fill missing slots, concatenate channel-major.
FeatureVector assemble(const std::vector<std::vector<double>>& channels,
                       std::span<const double> times, const std::string& label,
                       int smooth_window = 20, double abs_floor = 0.05,
                       double rel_fraction = 0.2);

}  // namespace etroll
