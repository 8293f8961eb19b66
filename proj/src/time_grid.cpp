#include "insider/time_grid.hpp"

#include <cmath>
#include <sstream>

#include "insider/errors.hpp"

namespace insider {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, sep)) parts.push_back(item);
    return parts;
}

double to_double(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ValidationError("bad number '" + text + "' in time grid");
    }
    if (used != text.size()) throw ValidationError("bad number '" + text + "' in time grid");
    return value;
}

int to_int(const std::string& text) {
    const double v = to_double(text);
    if (v != std::floor(v) || v < 1 || v > 1e7) throw ValidationError("bad count '" + text + "' in time grid");
    return static_cast<int>(v);
}

}  // namespace

std::vector<double> linear_grid(double a, double b, int n) {
    if (n < 2 || !(a < b)) throw ValidationError("linear grid needs a < b and n >= 2");
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = a + (b - a) * i / (n - 1);
    grid.back() = b;
    return grid;
}

std::vector<double> geometric_to_one_grid(int levels) {
    if (levels < 1 || levels > 50) throw ValidationError("geometric grid needs 1 <= k <= 50");
    std::vector<double> grid{0.0};
    for (int j = 1; j <= levels; ++j) grid.push_back(1.0 - std::ldexp(1.0, -j));
    return grid;
}

std::vector<double> arcsine_grid(double a, double b, int n) {
    if (n < 2 || !(a >= 0.0 && a < b && b <= 1.0)) throw ValidationError("arcsine grid needs 0 <= a < b <= 1, n >= 2");
    const double lo = std::asin(std::sqrt(a));
    const double hi = std::asin(std::sqrt(b));
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) {
        const double s = std::sin(lo + (hi - lo) * i / (n - 1));
        grid[i] = s * s;
    }
    grid.front() = a;
    grid.back() = b;
    return grid;
}

std::vector<double> power_grid(double horizon, int n, double q) {
    if (n < 2 || !(horizon > 0.0 && horizon < 1.0) || !(q > 0.0 && q <= 1.0))
        throw ValidationError("power grid needs 0 < T < 1, n >= 2 and 0 < q <= 1");
    const double end = std::pow(1.0 - horizon, q);
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) {
        const double u = 1.0 - (1.0 - end) * i / (n - 1);
        grid[i] = 1.0 - std::pow(u, 1.0 / q);
    }
    grid.front() = 0.0;
    grid.back() = horizon;
    return grid;
}

std::vector<double> parse_time_grid(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ValidationError("time grid spec '" + spec + "' has no kind prefix");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (kind == "list") {
        std::vector<double> grid;
        for (const auto& item : split(rest, ',')) grid.push_back(to_double(item));
        if (grid.empty()) throw ValidationError("empty time list");
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            if (!(grid[i] < grid[i + 1])) throw ValidationError("time list must be strictly increasing");
        return grid;
    }
    const auto args = split(rest, ':');
    if (kind == "linear" && args.size() == 3) return linear_grid(to_double(args[0]), to_double(args[1]), to_int(args[2]));
    if (kind == "arcsine" && args.size() == 3)
        return arcsine_grid(to_double(args[0]), to_double(args[1]), to_int(args[2]));
    if (kind == "power" && args.size() == 3)
        return power_grid(to_double(args[0]), to_int(args[1]), to_double(args[2]));
    if (kind == "geometric-to-1" && args.size() == 1) return geometric_to_one_grid(to_int(args[0]));
    throw ValidationError("unrecognised time grid spec '" + spec + "'");
}

}  // namespace insider
