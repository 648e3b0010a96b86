#pragma once

#include "gpsmooth/systems/system.hpp"

namespace gpsmooth::systems {

// Scalar growth system: f(x) = x/2 + 25x/(1+x^2), g(x) = 5 sin(x).
// Noise is added by the simulator, not by these maps.
double kitagawa_f(double x);
double kitagawa_g(double x);

struct KitagawaParams {
  double sigma_w = 0.2;
  double sigma_v = 0.2;
};

AnalyticSystem kitagawa_system(const KitagawaParams& p = {});

// Training inputs drawn uniformly from [region_lo, region_hi]; both GPs share
// the same input locations.
TrainingSet make_kitagawa_training(int n, const KitagawaParams& p, double region_lo,
                                   double region_hi, std::uint64_t seed);

}  // namespace gpsmooth::systems
