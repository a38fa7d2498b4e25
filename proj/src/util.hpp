#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace etroll {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double k, Vec2 v) { return {k * v.x, k * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

inline Vec2 rotated(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline double wrap_positive(double value, double period) {
    double r = std::fmod(value, period);
    if (r < 0.0) r += period;
    return r;
}

// Union of intervals on a circular domain [0, period). Used to accumulate
// which parts of an object boundary have touched the sensing finger.
class CircularIntervalSet {
public:
    explicit CircularIntervalSet(double period) : period_(period) {}

    void add(double lo, double hi) {
        if (hi < lo) std::swap(lo, hi);
        if (hi - lo >= period_) {
            segments_ = {{0.0, period_}};
            return;
        }
        lo = wrap_positive(lo, period_);
        hi = wrap_positive(hi, period_);
        if (hi >= lo) {
            insert_linear(lo, hi);
        } else {
            insert_linear(lo, period_);
            insert_linear(0.0, hi);
        }
    }

    double total_length() const {
        double sum = 0.0;
        for (const auto& s : segments_) sum += s.second - s.first;
        return sum;
    }

    const std::vector<std::pair<double, double>>& segments() const { return segments_; }

private:
    void insert_linear(double lo, double hi) {
        std::vector<std::pair<double, double>> out;
        out.reserve(segments_.size() + 1);
        for (const auto& s : segments_) {
            if (s.second < lo || s.first > hi) {
                out.push_back(s);
            } else {
                lo = std::min(lo, s.first);
                hi = std::max(hi, s.second);
            }
        }
        out.emplace_back(lo, hi);
        std::sort(out.begin(), out.end());
        segments_ = std::move(out);
    }

    double period_;
    std::vector<std::pair<double, double>> segments_;
};

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v);
std::string hex64(std::uint64_t v);

}  // namespace etroll
