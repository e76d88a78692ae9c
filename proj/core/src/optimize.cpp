#include "merton/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "merton/errors.hpp"

namespace merton {

namespace {

class CountingObjective {
public:
    explicit CountingObjective(const std::function<double(double)>& f) : f_(f) {}

    double operator()(double x) {
        const double value = f_(x);
        ++evaluations_;
        if (std::isnan(value)) throw NanObjective(x, "objective returned NaN at x = " + std::to_string(x));
        if (value < best_value_) {
            best_value_ = value;
            best_x_ = x;
        }
        return value;
    }

    int evaluations() const { return evaluations_; }
    double best_x() const { return best_x_; }
    double best_value() const { return best_value_; }

private:
    const std::function<double(double)>& f_;
    int evaluations_ = 0;
    double best_x_ = std::numeric_limits<double>::quiet_NaN();
    double best_value_ = std::numeric_limits<double>::infinity();
};

}  // namespace

ScalarMinimum minimize_scalar(const std::function<double(double)>& objective, Interval bounds,
                              const MinimizeOptions& options) {
    if (!std::isfinite(bounds.lower) || !std::isfinite(bounds.upper) || bounds.upper < bounds.lower)
        throw InvalidArgument("minimize_scalar needs a finite, non-empty interval");
    if (!(options.tol > 0.0)) throw InvalidArgument("minimize_scalar tolerance must be positive");
    if (options.scan_points < 2) throw InvalidArgument("minimize_scalar needs at least two scan points");

    CountingObjective f(objective);

    if (bounds.upper == bounds.lower) {
        const double value = f(bounds.lower);
        return {bounds.lower, value, 0, f.evaluations(), true};
    }

    const int n = options.scan_points;
    const double width = bounds.upper - bounds.lower;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = i == n - 1 ? bounds.upper : bounds.lower + width * i / (n - 1);
    }

    std::vector<double> values(n);
    int best = 0;
    for (int i = 0; i < n; ++i) {
        values[i] = f(grid[i]);
        if (values[i] < values[best]) best = i;
    }
    if (std::isinf(values[best])) {
        return {bounds.lower, values[best], 0, f.evaluations(), false};
    }

    int iterations = 0;
    auto refine = [&](int i) {
        double a = grid[i > 0 ? i - 1 : 0];
        double b = grid[i < n - 1 ? i + 1 : n - 1];
        constexpr double inv_phi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = f(c);
        double fd = f(d);
        double best_x = grid[i];
        double best_f = values[i];
        auto consider = [&](double x, double fx) {
            if (fx < best_f) {
                best_f = fx;
                best_x = x;
            }
        };
        consider(c, fc);
        consider(d, fd);
        while (b - a > options.tol) {
            ++iterations;
            if (fc <= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
                consider(c, fc);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
                consider(d, fd);
            }
        }
        const double mid = 0.5 * (a + b);
        consider(mid, f(mid));
        return std::pair{best_x, best_f};
    };

    std::vector<std::pair<double, double>> basins{refine(best)};
    if (options.ambiguity_tol > 0.0) {
        for (int i = 0; i < n; ++i) {
            if (std::abs(i - best) < 2 || !std::isfinite(values[i])) continue;
            const bool left_ok = i == 0 || values[i] <= values[i - 1];
            const bool right_ok = i == n - 1 || values[i] <= values[i + 1];
            if (left_ok && right_ok) basins.push_back(refine(i));
        }
    }

    const double argmin = f.best_x();
    ScalarMinimum result{argmin, f.best_value(), iterations, f.evaluations(),
                         std::abs(argmin - bounds.lower) <= options.tol ||
                             std::abs(argmin - bounds.upper) <= options.tol};
    const double accept = result.value + options.ambiguity_tol;
    double runner_up = std::numeric_limits<double>::infinity();
    for (const auto& [x, value] : basins) {
        if (std::abs(x - argmin) <= 2.0 * width / (n - 1) || value > accept) continue;
        ++result.alternative_minima;
        if (value < runner_up) {
            runner_up = value;
            result.alternative_argmin = x;
        }
    }
    return result;
}

}  // namespace merton
