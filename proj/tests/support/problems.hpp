#pragma once

#include <cmath>
#include <cstddef>
#include <random>

#include "cellpool/scheduler.hpp"

namespace cellpool::oracle {

// Random band: B BSs with `per_bs` users each, gains log-uniform over 40 dB
// with the serving link boosted so most tiles are usable.
inline SchedulingProblem random_problem(std::size_t b, std::size_t per_bs, std::size_t c, std::size_t t,
                                        unsigned seed, bool restrict_subchannels = false) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SchedulingProblem p;
  p.n_bs = b;
  p.n_users = b * per_bs;
  p.n_subchannels = c;
  p.n_slots = t;
  for (std::size_t i = 0; i < b; ++i) p.bs_ids.push_back(static_cast<int>(10 * i + 3));
  for (std::size_t m = 0; m < p.n_users; ++m) {
    p.user_ids.push_back(static_cast<int>(m));
    p.serving.push_back(m % b);
  }
  p.gain.resize(c * p.n_users * b);
  for (std::size_t ci = 0; ci < c; ++ci)
    for (std::size_t m = 0; m < p.n_users; ++m)
      for (std::size_t bi = 0; bi < b; ++bi) {
        double v = 1e-12 * std::pow(10.0, 4.0 * u(g));
        if (p.serving[m] == bi) v *= 30.0;
        p.gain[(ci * p.n_users + m) * b + bi] = v;
      }
  if (restrict_subchannels) {
    p.permitted.assign(b * c, 1);
    for (auto& x : p.permitted) x = u(g) < 0.7;
  }
  p.tx_power = 1.25;
  p.noise_power = 1e-13;
  p.subchannel_bandwidth = 312500.0;
  p.epsilon = 1.0;
  return p;
}

}  // namespace cellpool::oracle
