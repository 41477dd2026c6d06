#include "cellpool/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cellpool/errors.hpp"

namespace cellpool {

namespace {

// W_C log2(1 + S / (N + scale * I)); `signal` already includes tx power.
struct RateModel {
  double tx_power;
  double noise;
  double interference_scale;
  double bandwidth;

  explicit RateModel(const SchedulingProblem& p)
      : tx_power(p.tx_power),
        noise(p.noise_power),
        interference_scale(p.interference_power_literal ? 1.0 : p.tx_power),
        bandwidth(p.subchannel_bandwidth) {}

  double operator()(double serving_gain, double interference_gain) const {
    return bandwidth * std::log2(1.0 + tx_power * serving_gain / (noise + interference_scale * interference_gain));
  }
};

std::vector<std::vector<std::size_t>> users_by_bs(const SchedulingProblem& p) {
  std::vector<std::vector<std::size_t>> out(p.n_bs);
  for (std::size_t m = 0; m < p.n_users; ++m) out[p.serving[m]].push_back(m);
  for (auto& list : out)
    std::stable_sort(list.begin(), list.end(),
                     [&](std::size_t a, std::size_t b) { return p.user_ids[a] < p.user_ids[b]; });
  return out;
}

struct Scheduled {
  std::size_t user;
  std::size_t bs;
  double serving_gain;
  double interference_gain;
  double rate;
};

}  // namespace

void SchedulingProblem::validate() const {
  std::vector<std::string> problems;
  if (n_subchannels < 1) problems.emplace_back("n_subchannels must be at least 1");
  if (n_slots < 1) problems.emplace_back("n_slots must be at least 1");
  if (bs_ids.size() != n_bs) problems.emplace_back("bs_ids size must equal n_bs");
  if (user_ids.size() != n_users) problems.emplace_back("user_ids size must equal n_users");
  if (serving.size() != n_users) problems.emplace_back("serving size must equal n_users");
  for (std::size_t s : serving)
    if (s >= n_bs) {
      problems.emplace_back("serving BS index out of range");
      break;
    }
  if (gain.size() != n_subchannels * n_users * n_bs) problems.emplace_back("gain size must be C x N x B");
  if (!permitted.empty() && permitted.size() != n_bs * n_subchannels)
    problems.emplace_back("permitted size must be B x C");
  if (!(tx_power > 0.0)) problems.emplace_back("tx_power must be positive");
  if (!(noise_power >= 0.0)) problems.emplace_back("noise_power must be non-negative");
  if (!(subchannel_bandwidth > 0.0)) problems.emplace_back("subchannel_bandwidth must be positive");
  if (!(epsilon > 0.0)) problems.emplace_back("epsilon must be positive");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

AllocationState::AllocationState(std::size_t n_bs, std::size_t n_users, std::size_t n_subchannels,
                                 std::size_t n_slots)
    : n_bs_(n_bs),
      n_users_(n_users),
      n_subchannels_(n_subchannels),
      n_slots_(n_slots),
      rate_(n_users * n_slots, 0.0),
      active_(n_bs * n_subchannels * n_slots, 0),
      assigned_(n_users * n_subchannels * n_slots, 0),
      tile_rate_(n_bs * n_subchannels * n_slots, 0.0),
      counts_(n_bs, 0) {}

void AllocationState::set_active(std::size_t b, std::size_t c, std::size_t t, std::size_t m, double r) {
  active_[(b * n_subchannels_ + c) * n_slots_ + t] = 1;
  assigned_[(m * n_subchannels_ + c) * n_slots_ + t] = 1;
  tile_rate_[(b * n_subchannels_ + c) * n_slots_ + t] = r;
  ++counts_[b];
}

AllocationState allocate_frame(const SchedulingProblem& p, const AllocationOptions& options) {
  p.validate();
  const RateModel rate_of(p);
  const auto members = users_by_bs(p);
  AllocationState state(p.n_bs, p.n_users, p.n_subchannels, p.n_slots);
  AllocationCounters counters;

  std::vector<std::size_t> order(p.n_bs);
  std::vector<std::size_t> active;
  std::vector<Scheduled> scheduled;
  active.reserve(p.n_bs);
  scheduled.reserve(p.n_bs);

  for (std::size_t t = 0; t < p.n_slots; ++t) {
    if (t > 0)
      for (std::size_t m = 0; m < p.n_users; ++m) state.rate_ref(m, t) = state.rate(m, t - 1);
    for (std::size_t c = 0; c < p.n_subchannels; ++c) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (state.assigned_count(a) != state.assigned_count(b)) return state.assigned_count(a) < state.assigned_count(b);
        return p.bs_ids[a] < p.bs_ids[b];
      });
      active.clear();
      scheduled.clear();
      const double* gain_c = p.gain.data() + c * p.n_users * p.n_bs;

      for (std::size_t b : order) {
        if (members[b].empty() || !p.may_use(b, c)) continue;

        // Loss does not depend on which of b's users is chosen.
        double loss = 0.0;
        for (const Scheduled& s : scheduled) {
          const double r_new = rate_of(s.serving_gain, s.interference_gain + gain_c[s.user * p.n_bs + b]);
          loss -= std::log1p((r_new - s.rate) / (p.epsilon + state.rate(s.user, t)));
        }

        std::size_t best_user = 0;
        double best_gain = -1.0, best_rate = 0.0, best_interference = 0.0;
        for (std::size_t m : members[b]) {
          const double* row = gain_c + m * p.n_bs;
          double interference = 0.0;
          for (std::size_t a : active) interference += row[a];
          const double r = rate_of(row[b], interference);
          const double g = std::log1p(r / (p.epsilon + state.rate(m, t)));
          if (g > best_gain) {
            best_gain = g;
            best_user = m;
            best_rate = r;
            best_interference = interference;
          }
        }
        counters.candidate_evaluations += members[b].size();
        counters.interference_terms += members[b].size() * active.size() + scheduled.size();

        const UtilityDelta delta{best_gain, loss, best_gain - loss};
        if (!(delta.net > 0.0)) continue;

        for (Scheduled& s : scheduled) {
          s.interference_gain += gain_c[s.user * p.n_bs + b];
          const double r_new = rate_of(s.serving_gain, s.interference_gain);
          state.rate_ref(s.user, t) += r_new - s.rate;
          s.rate = r_new;
          state.set_tile_rate(s.bs, c, t, r_new);
        }
        state.rate_ref(best_user, t) += best_rate;
        state.set_active(b, c, t, best_user, best_rate);
        scheduled.push_back({best_user, b, gain_c[best_user * p.n_bs + b], best_interference, best_rate});
        active.push_back(b);
        ++counters.accepted;
        if (options.on_accept) options.on_accept({b, best_user, c, t, delta}, state);
      }
    }
  }
  if (options.counters) *options.counters = counters;
  return state;
}

double tile_rate_under(const SchedulingProblem& p, const AllocationState& state, std::size_t m, std::size_t c,
                       std::size_t t, std::ptrdiff_t extra) {
  const std::size_t serving = p.serving[m];
  double interference = 0.0;
  for (std::size_t a = 0; a < p.n_bs; ++a) {
    const bool on = state.active(a, c, t) || static_cast<std::ptrdiff_t>(a) == extra;
    if (on && a != serving) interference += p.gain_at(c, m, a);
  }
  return RateModel(p)(p.gain_at(c, m, serving), interference);
}

UtilityDelta marginal_utility(const SchedulingProblem& p, const AllocationState& state, std::size_t m,
                              std::size_t b, std::size_t c, std::size_t t) {
  if (m >= p.n_users || b >= p.n_bs || c >= p.n_subchannels || t >= p.n_slots)
    throw DomainError("marginal_utility: index out of range");
  if (p.serving[m] != b) throw DomainError("marginal_utility: user is not served by this BS");
  if (!p.may_use(b, c)) throw DomainError("marginal_utility: BS may not use this subchannel");
  if (state.active(b, c, t)) throw DomainError("marginal_utility: BS already active on this tile");

  UtilityDelta d;
  const double r_m = tile_rate_under(p, state, m, c, t);
  d.gain = std::log1p(r_m / (p.epsilon + state.rate(m, t)));
  for (std::size_t i = 0; i < p.n_users; ++i) {
    if (!state.assigned(i, c, t)) continue;
    const double before = tile_rate_under(p, state, i, c, t);
    const double after = tile_rate_under(p, state, i, c, t, static_cast<std::ptrdiff_t>(b));
    d.loss -= std::log1p((after - before) / (p.epsilon + state.rate(i, t)));
  }
  d.net = d.gain - d.loss;
  return d;
}

void accumulate_throughput(const AllocationState& frame, std::span<double> sums) {
  if (sums.size() != frame.n_users()) throw DomainError("accumulate_throughput: size mismatch");
  const std::size_t last = frame.n_slots() - 1;
  const double inv_t = 1.0 / static_cast<double>(frame.n_slots());
  for (std::size_t m = 0; m < frame.n_users(); ++m) sums[m] += frame.rate(m, last) * inv_t;
}

std::vector<double> user_throughput(std::span<const AllocationState> frames) {
  if (frames.empty()) throw DomainError("user_throughput: no frames");
  std::vector<double> sums(frames.front().n_users(), 0.0);
  for (const AllocationState& f : frames) accumulate_throughput(f, sums);
  for (double& s : sums) s /= static_cast<double>(frames.size());
  return sums;
}

}  // namespace cellpool
