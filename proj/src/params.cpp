#include "actr/params.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace actr {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    const char* end = begin + value.size();
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end)
        throw DomainError("parameter '" + key + "': not a number: '" + value + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    const char* end = begin + value.size();
    int out = 0;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end)
        throw DomainError("parameter '" + key + "': not an integer: '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    throw DomainError("parameter '" + key + "': not a boolean: '" + value + "'");
}

void require(bool ok, const std::string& key, const char* constraint) {
    if (!ok)
        throw DomainError("parameter '" + key + "' violates constraint: " +
                          constraint);
}

}  // namespace

void Parameters::set(const std::string& key, const std::string& value) {
    auto num = [&] { return parse_double(key, value); };

    if (key == "decay_mode") {
        if (value == "constant") {
            declarative.decay_mode = ConstantDecay{};
        } else if (value == "as91") {
            declarative.decay_mode = SpacingAS91{};
        } else if (value == "pa08") {
            declarative.decay_mode = SpacingPA08{};
        } else {
            throw DomainError("parameter 'decay_mode': unknown mode '" + value +
                              "' (constant|as91|pa08)");
        }
        return;
    }
    if (key == "decay_d") {
        const double v = num();
        require(v > 0.0 && v < 1.0, key, "d in (0,1)");
        if (auto* m = std::get_if<ConstantDecay>(&declarative.decay_mode)) {
            m->d = v;
        } else {
            declarative.decay_mode = ConstantDecay{v};
        }
        return;
    }
    if (key == "as91_d1" || key == "as91_b") {
        SpacingAS91 m;
        if (auto* cur = std::get_if<SpacingAS91>(&declarative.decay_mode)) m = *cur;
        const double v = num();
        if (key == "as91_d1") {
            require(v > 0.0 && v < 1.0, key, "d1 in (0,1)");
            m.d1 = v;
        } else {
            require(v > 0.0, key, "b > 0");
            m.b = v;
        }
        declarative.decay_mode = m;
        return;
    }
    if (key == "pa08_c" || key == "pa08_alpha") {
        SpacingPA08 m;
        if (auto* cur = std::get_if<SpacingPA08>(&declarative.decay_mode)) m = *cur;
        const double v = num();
        if (key == "pa08_c") {
            require(v >= 0.0, key, "c >= 0");
            m.c = v;
        } else {
            require(v > 0.0 && v < 1.0, key, "alpha in (0,1)");
            m.alpha = v;
        }
        declarative.decay_mode = m;
        return;
    }
    if (key == "base_B") {
        declarative.base_B = num();
        return;
    }
    if (key == "retrieval_F") {
        const double v = num();
        require(v > 0.0, key, "F > 0");
        declarative.retrieval_F = v;
        return;
    }
    if (key == "retrieval_C") {
        const double v = num();
        require(v >= 0.0, key, "C >= 0");
        declarative.retrieval_C = v;
        return;
    }
    if (key == "recall_tau") {
        declarative.recall_threshold_tau = num();
        return;
    }
    if (key == "recall_s") {
        const double v = num();
        require(v > 0.0, key, "s > 0");
        declarative.recall_noise_s = v;
        return;
    }
    if (key == "assoc_prior_a") {
        const double v = num();
        require(v > 0.0, key, "a > 0");
        assoc.prior_a = v;
        return;
    }
    if (key == "assoc_prior_b") {
        const double v = num();
        require(v > 0.0, key, "b > 0");
        assoc.prior_b = v;
        return;
    }
    if (key == "strength_d") {
        const double v = num();
        require(v > 0.0 && v < 1.0, key, "d in (0,1)");
        strength.d = v;
        return;
    }
    if (key == "strength_B") {
        strength.B = num();
        return;
    }
    if (key == "initial_strength") {
        strength.initial = num();
        return;
    }
    if (key == "latency_B") {
        const double v = num();
        require(v > 0.0, key, "B > 0");
        latency.B = v;
        return;
    }
    if (key == "latency_b") {
        const double v = num();
        require(v > 0.0, key, "b > 0");
        latency.b = v;
        return;
    }
    if (key == "goal_value_G") {
        const double v = num();
        require(v > 0.0, key, "G > 0");
        conflict.goal_value_G = v;
        return;
    }
    if (key == "waiting_cost_tau") {
        const double v = num();
        require(v >= 0.0, key, "tau >= 0");
        conflict.waiting_cost_tau = v;
        return;
    }
    if (key == "q_prior_alpha") {
        const double v = num();
        require(v > 0.0, key, "alpha > 0");
        utility.q_prior_alpha = v;
        return;
    }
    if (key == "q_prior_beta") {
        const double v = num();
        require(v > 0.0, key, "beta > 0");
        utility.q_prior_beta = v;
        return;
    }
    if (key == "cost_prior") {
        const double v = num();
        require(v >= 0.0, key, "C0 >= 0");
        utility.cost_prior = v;
        return;
    }
    if (key == "r_mode") {
        if (value == "constant") {
            utility.r_mode = RConstant{};
        } else if (value == "cost_discount") {
            utility.r_mode = RCostDiscount{};
        } else {
            throw DomainError("parameter 'r_mode': unknown mode '" + value +
                              "' (constant|cost_discount)");
        }
        return;
    }
    if (key == "r_constant") {
        const double v = num();
        require(v >= 0.0 && v <= 1.0, key, "r0 in [0,1]");
        utility.r_mode = RConstant{v};
        return;
    }
    if (key == "r_budget") {
        const double v = num();
        require(v > 0.0, key, "budget > 0");
        utility.r_mode = RCostDiscount{v};
        return;
    }
    if (key == "action_time") {
        const double v = num();
        require(v >= 0.0, key, "action_time >= 0");
        engine.action_time = v;
        return;
    }
    if (key == "max_cycles") {
        const int v = parse_int(key, value);
        require(v > 0, key, "max_cycles > 0");
        engine.max_cycles = v;
        return;
    }
    if (key == "strengthen_losers") {
        engine.strengthen_losers = parse_bool(key, value);
        return;
    }
    throw DomainError("unknown parameter key '" + key + "'");
}

}  // namespace actr
