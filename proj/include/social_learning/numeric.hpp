#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace social_learning {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum(exp(v))). The largest term is pulled out and the remainder goes
// through log1p, so a dominant entry keeps full relative precision in the
// small ones (log of a belief close to 1 stays distinguishable from 0).
inline double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return kNegInf;
    const auto top = std::max_element(v.begin(), v.end());
    const double m = *top;
    if (m == kNegInf) return kNegInf;
    if (std::isinf(m)) return m;
    double rest = 0.0;
    for (auto it = v.begin(); it != v.end(); ++it) {
        if (it == top) continue;
        rest += std::exp(*it - m);
    }
    return m + std::log1p(rest);
}

// log(1 - exp(x)) for x <= 0.
inline double log1m_exp(double x) {
    if (x > -0.6931471805599453) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

}  // namespace social_learning
