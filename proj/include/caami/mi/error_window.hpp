#pragma once

#include <deque>

namespace caami::mi {

/// Sliding window over the one-sided speed shortfall max(0, expert - actual).
/// The signal is treated as piecewise linear between samples; mean_error is
/// its time average over [t - length, t], and stays 0 until the window holds
/// a full length of data.
class MotionErrorWindow {
public:
    struct Entry {
        double t;
        double error;
    };

    explicit MotionErrorWindow(double length = 5.0);

    double update(double expert_speed, double actual_speed, double t);
    void reset();

    double mean_error() const { return mean_; }
    double length() const { return length_; }
    bool full() const;
    const std::deque<Entry>& entries() const { return entries_; }

private:
    double length_;
    std::deque<Entry> entries_;
    double mean_ = 0.0;
};

}  // namespace caami::mi
