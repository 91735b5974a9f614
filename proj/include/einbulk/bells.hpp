#pragma once

#include "einbulk/jets.hpp"

#include <string>
#include <vector>

namespace einbulk {

/// The explicit bump exp(1/(|x - center|^2 - r^2)) supported on the closed
/// ball of radius r, written in the coordinates of one chart (the chart used
/// for the ball inversion).
struct BellFunction {
    std::string chart_id;
    std::vector<double> center;
    double radius = 1.0;
};

/// Pointwise value: exp(1/(|x-c|^2 - r^2)) inside the open ball, 0 at and
/// beyond the boundary.
double bell_eval(const BellFunction& f, const std::vector<double>& p);

/// Taylor expansion about a strict interior point of the support.
/// Throws ExpansionOutsideSupport otherwise.
Jet bell_jet(const BellFunction& f, const std::vector<double>& about, int order);

} // namespace einbulk
