#include "actr/utility.hpp"

#include <algorithm>

namespace actr {

double UtilityStats::estimate_r(double spent_cost) const {
    struct Visitor {
        double spent;
        double operator()(const RConstant& m) const { return m.r0; }
        double operator()(const RCostDiscount& m) const {
            return std::max(0.0, 1.0 - spent / m.budget);
        }
    };
    return std::visit(Visitor{spent_cost}, r_mode);
}

}  // namespace actr
