#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace caami::attention {

struct HeadPoseSample {
    double timestamp = 0.0;  // s
    double yaw = 0.0;        // deg, 0 = facing the console, + = toward the secondary screen
};

struct AvailabilityEstimate {
    double filtered_yaw = 0.0;
    double attending_degree = 1.0;
    bool attending = true;

    friend bool operator==(const AvailabilityEstimate&, const AvailabilityEstimate&) = default;
};

struct YawCalibration {
    double attend_band = 15.0;  // |yaw| at or below: degree 1
    double away_band = 30.0;    // |yaw| at or above: degree 0

    /// Throws CalibrationError unless 0 < attend_band < away_band <= 90.
    void validate() const;
};

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double max_yaw = 90.0;
inline constexpr double min_attend_band = 5.0;
inline constexpr double default_alpha = 0.2;

double ema_update(double prev_filtered, double yaw, double alpha);

class EmaFilter {
public:
    explicit EmaFilter(double alpha = default_alpha);

    /// The first sample initializes the filter to its own value.
    double update(double yaw);
    std::optional<double> value() const { return value_; }
    double alpha() const { return alpha_; }
    void reset() { value_.reset(); }

private:
    double alpha_;
    std::optional<double> value_;
};

AvailabilityEstimate classify(double filtered_yaw, const YawCalibration& cal);

/// attend_band = mean|attending| + 2 sd (at least min_attend_band);
/// away_band = midpoint of attend_band and mean|away|.
YawCalibration calibrate(const std::vector<double>& baseline_attending,
                         const std::vector<double>& baseline_away);

/// Filter plus dropout handling. Missing samples count as yaw = max_yaw
/// once more than `dropout_grace` seconds have passed since the last one.
class AvailabilityTracker {
public:
    AvailabilityTracker(double alpha = default_alpha, YawCalibration cal = {},
                        double dropout_grace = 0.5);

    /// Advances one tick. `sample` is the yaw observed during this tick, if any.
    AvailabilityEstimate update(double t, std::optional<double> sample);

    const AvailabilityEstimate& estimate() const { return estimate_; }
    const YawCalibration& calibration() const { return cal_; }

private:
    EmaFilter filter_;
    YawCalibration cal_;
    double dropout_grace_;
    double last_seen_ = 0.0;
    AvailabilityEstimate estimate_;
};

/// Trace format: one `timestamp_s yaw_deg` pair per line; blank lines and
/// lines starting with '#' are skipped. Throws std::runtime_error on bad
/// syntax, yaw outside [-90, 90] or non-increasing timestamps.
std::vector<HeadPoseSample> read_yaw_trace(std::istream& in);
std::vector<HeadPoseSample> load_yaw_trace(const std::string& path);
void write_yaw_trace(std::ostream& out, const std::vector<HeadPoseSample>& trace);

}  // namespace caami::attention
