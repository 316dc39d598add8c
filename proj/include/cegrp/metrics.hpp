#pragma once

#include <stdexcept>

namespace cegrp {

// Percentage deviation of a heuristic objective from a reference value.
// Negative when the heuristic beats the reference.
inline double gap_percent(double f_heuristic, double f_reference) {
    if (!(f_reference > 0.0))
        throw std::invalid_argument("gap_percent: reference must be positive");
    return 100.0 * (f_heuristic - f_reference) / f_reference;
}

// Percentage of distance saved by a mechanism relative to running without
// it. Negative when the mechanism made things worse.
inline double saving_rate(double f_without, double f_with) {
    if (!(f_without > 0.0))
        throw std::invalid_argument("saving_rate: baseline must be positive");
    return 100.0 * (f_without - f_with) / f_without;
}

}  // namespace cegrp
