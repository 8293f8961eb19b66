#pragma once

#include <string>
#include <vector>

namespace insider {

// Time grids from a compact text spec:
//   linear:a:b:n        n equally spaced points from a to b (inclusive)
//   geometric-to-1:k    {0} and 1 - 2^-j for j = 1..k
//   arcsine:a:b:n       n points equally spaced in asin(sqrt(t)); refines both ends
//   power:T:n:q         n points from 0 to T < 1, equally spaced in (1 - t)^q;
//                       q < 1 crowds the points toward T
//   list:t0,t1,...      explicit values
std::vector<double> parse_time_grid(const std::string& spec);

std::vector<double> linear_grid(double a, double b, int n);
std::vector<double> geometric_to_one_grid(int levels);
std::vector<double> arcsine_grid(double a, double b, int n);
std::vector<double> power_grid(double horizon, int n, double q);

}  // namespace insider
