#include "caami/mi/error_window.hpp"

#include <algorithm>
#include <stdexcept>

namespace caami::mi {

namespace {
// Slack for tick times built from repeated sums of dt.
constexpr double time_eps = 1e-9;
}  // namespace

MotionErrorWindow::MotionErrorWindow(double length) : length_(length) {
    if (!(length > 0.0)) {
        throw std::invalid_argument("error window length must be positive");
    }
}

void MotionErrorWindow::reset() {
    entries_.clear();
    mean_ = 0.0;
}

bool MotionErrorWindow::full() const {
    return entries_.size() >= 2 && entries_.back().t - entries_.front().t >= length_ - time_eps;
}

double MotionErrorWindow::update(double expert_speed, double actual_speed, double t) {
    if (!entries_.empty() && !(t > entries_.back().t)) {
        throw std::invalid_argument("error window times must increase");
    }
    entries_.push_back({t, std::max(0.0, expert_speed - actual_speed)});
    const double lo = t - length_;
    // Keep one entry at or before the window start so it can be interpolated.
    while (entries_.size() >= 2 && entries_[1].t <= lo) {
        entries_.pop_front();
    }
    if (!full()) {
        mean_ = 0.0;
        return mean_;
    }
    double area = 0.0;
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        Entry a = entries_[i - 1];
        const Entry& b = entries_[i];
        if (a.t < lo) {
            const double s = (lo - a.t) / (b.t - a.t);
            a = {lo, a.error + s * (b.error - a.error)};
        }
        area += 0.5 * (a.error + b.error) * (b.t - a.t);
    }
    mean_ = std::max(0.0, area / length_);
    return mean_;
}

}  // namespace caami::mi
