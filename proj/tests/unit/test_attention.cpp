#include <cmath>
#include <sstream>

#include "doctest.h"

#include "caami/attention/attention.hpp"
#include "caami/world/random.hpp"

using namespace caami;
using namespace caami::attention;

TEST_CASE("ema_update examples") {
    for (double a : {0.05, 0.2, 0.9, 1.0}) CHECK(ema_update(10.0, 10.0, a) == 10.0);
    CHECK(ema_update(0.0, 30.0, 0.2) == doctest::Approx(6.0).epsilon(1e-15));

    EmaFilter f(0.2);
    CHECK_FALSE(f.value());
    CHECK(f.update(17.0) == 17.0);  // first sample initializes
    CHECK_THROWS(EmaFilter(0.0));
    CHECK_THROWS(EmaFilter(1.5));
}

TEST_CASE("ema constant input matches the closed form") {
    EmaFilter f(0.2);
    f.update(0.0);
    double y = 0.0;
    for (int k = 0; k < 10; ++k) y = f.update(45.0);
    CHECK(std::abs(y - 45.0 * (1.0 - std::pow(0.8, 10))) < 1e-9);
    CHECK(y == doctest::Approx(40.17).epsilon(1e-3));
}

TEST_CASE("ema output stays within the input extrema") {
    Rng rng(9);
    std::uniform_real_distribution<double> yaw(-90.0, 90.0);
    std::uniform_real_distribution<double> alpha(0.01, 1.0);
    for (int trace = 0; trace < 200; ++trace) {
        EmaFilter f(alpha(rng));
        double lo = INFINITY;
        double hi = -INFINITY;
        for (int k = 0; k < 100; ++k) {
            const double x = yaw(rng);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            const double y = f.update(x);
            REQUIRE(y >= lo);
            REQUIRE(y <= hi);
        }
    }
}

TEST_CASE("classify examples and shape") {
    const YawCalibration cal{15.0, 30.0};
    const auto center = classify(0.0, cal);
    CHECK(center.attending_degree == 1.0);
    CHECK(center.attending);
    const auto away = classify(45.0, cal);
    CHECK(away.attending_degree == 0.0);
    CHECK_FALSE(away.attending);
    CHECK(classify(22.5, cal).attending_degree == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(classify(22.5, cal).attending);

    double prev = 2.0;
    for (int i = 0; i <= 900; ++i) {
        const double yaw = i * 0.1;
        const auto pos = classify(yaw, cal);
        const auto neg = classify(-yaw, cal);
        REQUIRE(pos.attending_degree == neg.attending_degree);
        REQUIRE(pos.attending_degree <= prev);
        REQUIRE(pos.attending == (pos.attending_degree >= 0.5));
        prev = pos.attending_degree;
    }
}

TEST_CASE("step response crosses the away band on the predicted tick") {
    for (double alpha : {0.1, 0.2, 0.35}) {
        for (double step : {40.0, 60.0, 90.0}) {
            const YawCalibration cal{15.0, 30.0};
            EmaFilter f(alpha);
            f.update(0.0);
            int ticks = 0;
            while (f.update(step) < cal.away_band) ++ticks;
            ++ticks;
            const int predicted = static_cast<int>(
                std::ceil(std::log(1.0 - cal.away_band / step) / std::log(1.0 - alpha)));
            CHECK(ticks == predicted);
        }
    }
}

TEST_CASE("calibrate examples") {
    const auto c = calibrate(std::vector<double>(20, 0.0), std::vector<double>(20, 60.0));
    CHECK(c.attend_band == 5.0);
    CHECK(c.away_band == 32.5);

    CHECK_THROWS_AS(calibrate({10, 20, 30}, {10, 20, 30}), CalibrationError);
    CHECK_THROWS_AS(calibrate({}, {60}), CalibrationError);
    CHECK_THROWS_AS(calibrate({0, 40, 0, 40}, {25, 26}), CalibrationError);

    Rng rng(77);
    std::normal_distribution<double> att(5.0, 3.0);
    std::normal_distribution<double> away(50.0, 5.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(200);
        std::vector<double> b(200);
        for (auto& x : a) x = att(rng);
        for (auto& x : b) x = away(rng);
        const auto cal = calibrate(a, b);
        CHECK(cal.attend_band > 0.0);
        CHECK(cal.attend_band < cal.away_band);
        CHECK(cal.away_band <= 90.0);
    }
}

TEST_CASE("tracker falls back to not attending after a dropout") {
    AvailabilityTracker tr(0.2, {}, 0.5);
    double t = 0.0;
    for (int k = 0; k < 10; ++k, t += 0.1) CHECK(tr.update(t, 0.0).attending);
    // Samples stop: hold through the grace period, then decay toward 90.
    int ticks_until_away = 0;
    for (int k = 0; k < 100; ++k, t += 0.1) {
        const auto e = tr.update(t, std::nullopt);
        if (!e.attending) break;
        ++ticks_until_away;
    }
    // 5 held ticks, then EMA from 0 toward 90 passes 22.5 deg on update 2.
    CHECK(ticks_until_away == 6);
    CHECK(tr.update(t, 0.0).filtered_yaw < 90.0);
}

TEST_CASE("yaw trace round trip and validation") {
    const std::vector<HeadPoseSample> trace{{0.0, 0.0}, {0.1, 12.5}, {0.2, -3.25}, {0.3, 90.0}};
    std::ostringstream out;
    write_yaw_trace(out, trace);
    std::istringstream in("# comment\n" + out.str() + "\n");
    const auto back = read_yaw_trace(in);
    REQUIRE(back.size() == trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(back[i].timestamp == trace[i].timestamp);
        CHECK(back[i].yaw == trace[i].yaw);
    }
    std::istringstream bad_yaw("0 91\n");
    CHECK_THROWS(read_yaw_trace(bad_yaw));
    std::istringstream bad_order("0 1\n0 2\n");
    CHECK_THROWS(read_yaw_trace(bad_order));
    std::istringstream bad_syntax("0 x\n");
    CHECK_THROWS(read_yaw_trace(bad_syntax));
}
