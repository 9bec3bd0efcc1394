#pragma once

#include "ael/model.hpp"

#include <random>

namespace testing_support {

// Random parameters satisfying every validity constraint for the given orders.
inline ael::ParamVector random_valid_beta(const ael::ModelSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-0.7, 0.7);
    std::uniform_real_distribution<double> dd(0.02, 0.48);
    std::uniform_real_distribution<double> ss(0.3, 3.0);
    for (;;) {
        ael::ParamVector b;
        for (std::size_t i = 0; i < spec.p; ++i) b.phi.push_back(coef(rng) / (i + 1.0));
        for (std::size_t i = 0; i < spec.q; ++i) b.theta.push_back(coef(rng) / (i + 1.0));
        b.d = dd(rng);
        b.sigma2 = ss(rng);
        if (ael::validate(spec, b).ok()) return b;
    }
}

}  // namespace testing_support
