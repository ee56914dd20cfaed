#include "caami/attention/attention.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace caami::attention {

void YawCalibration::validate() const {
    if (!(attend_band > 0.0 && attend_band < away_band && away_band <= max_yaw)) {
        std::ostringstream msg;
        msg << "invalid yaw calibration: attend_band " << attend_band << ", away_band "
            << away_band;
        throw CalibrationError(msg.str());
    }
}

double ema_update(double prev_filtered, double yaw, double alpha) {
    return alpha * yaw + (1.0 - alpha) * prev_filtered;
}

EmaFilter::EmaFilter(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("EMA alpha must be in (0, 1]");
    }
}

double EmaFilter::update(double yaw) {
    value_ = value_ ? ema_update(*value_, yaw, alpha_) : yaw;
    return *value_;
}

AvailabilityEstimate classify(double filtered_yaw, const YawCalibration& cal) {
    const double a = std::abs(filtered_yaw);
    double degree = 0.0;
    if (a <= cal.attend_band) {
        degree = 1.0;
    } else if (a < cal.away_band) {
        degree = (cal.away_band - a) / (cal.away_band - cal.attend_band);
    }
    return {filtered_yaw, degree, degree >= 0.5};
}

namespace {

struct AbsStats {
    double mean = 0.0;
    double sd = 0.0;
};

AbsStats abs_stats(const std::vector<double>& xs) {
    AbsStats s;
    for (double x : xs) s.mean += std::abs(x);
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (std::abs(x) - s.mean) * (std::abs(x) - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace

YawCalibration calibrate(const std::vector<double>& baseline_attending,
                         const std::vector<double>& baseline_away) {
    if (baseline_attending.empty() || baseline_away.empty()) {
        throw CalibrationError("calibration needs samples for both conditions");
    }
    const AbsStats att = abs_stats(baseline_attending);
    const AbsStats away = abs_stats(baseline_away);
    if (!(away.mean > att.mean)) {
        throw CalibrationError("away baseline does not turn further than attending baseline");
    }
    YawCalibration cal;
    cal.attend_band = std::max(min_attend_band, att.mean + 2.0 * att.sd);
    cal.away_band = std::min(max_yaw, 0.5 * (cal.attend_band + away.mean));
    if (cal.attend_band >= cal.away_band) {
        throw CalibrationError("attending and away baselines overlap");
    }
    cal.validate();
    return cal;
}

AvailabilityTracker::AvailabilityTracker(double alpha, YawCalibration cal, double dropout_grace)
    : filter_(alpha), cal_(cal), dropout_grace_(dropout_grace) {
    cal_.validate();
}

AvailabilityEstimate AvailabilityTracker::update(double t, std::optional<double> sample) {
    if (sample) {
        last_seen_ = t;
        filter_.update(std::clamp(*sample, -max_yaw, max_yaw));
    } else if (t - last_seen_ > dropout_grace_ + 1e-9) {
        filter_.update(max_yaw);
    }
    // Before the first sample and inside the grace period the estimate holds.
    if (filter_.value()) {
        estimate_ = classify(*filter_.value(), cal_);
    }
    return estimate_;
}

namespace {

bool parse_double(std::string_view token, double& out) {
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

std::vector<HeadPoseSample> read_yaw_trace(std::istream& in) {
    std::vector<HeadPoseSample> trace;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::string ts;
        std::string yaw;
        std::string extra;
        HeadPoseSample s;
        if (!(fields >> ts >> yaw) || (fields >> extra) || !parse_double(ts, s.timestamp) ||
            !parse_double(yaw, s.yaw)) {
            throw std::runtime_error("yaw trace line " + std::to_string(line_no) +
                                     ": expected `timestamp_s yaw_deg`");
        }
        if (!(s.yaw >= -max_yaw && s.yaw <= max_yaw)) {
            throw std::runtime_error("yaw trace line " + std::to_string(line_no) +
                                     ": yaw outside [-90, 90]");
        }
        if (!trace.empty() && !(s.timestamp > trace.back().timestamp)) {
            throw std::runtime_error("yaw trace line " + std::to_string(line_no) +
                                     ": timestamps must strictly increase");
        }
        trace.push_back(s);
    }
    return trace;
}

std::vector<HeadPoseSample> load_yaw_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open yaw trace " + path);
    }
    return read_yaw_trace(in);
}

void write_yaw_trace(std::ostream& out, const std::vector<HeadPoseSample>& trace) {
    char buf[64];
    for (const auto& s : trace) {
        auto r = std::to_chars(buf, buf + sizeof buf, s.timestamp);
        out.write(buf, r.ptr - buf);
        out.put(' ');
        r = std::to_chars(buf, buf + sizeof buf, s.yaw);
        out.write(buf, r.ptr - buf);
        out.put('\n');
    }
}

}  // namespace caami::attention
