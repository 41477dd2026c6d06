#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

// Greedy interference-aware multi-cell tile allocation with log utility
// U(R) = ln(eps + R). All indices are local to one scheduling band.
namespace cellpool {

/// One band's scheduling input for a frame.
struct SchedulingProblem {
  std::size_t n_bs = 0;
  std::size_t n_users = 0;
  std::size_t n_subchannels = 0;
  std::size_t n_slots = 0;
  std::vector<int> bs_ids;            ///< global ids; order tie-breaks between BSs
  std::vector<int> user_ids;          ///< global ids; order tie-breaks between users
  std::vector<std::size_t> serving;   ///< per user: band-local serving BS
  std::vector<double> gain;           ///< combined link gain, [c][m][b]
  std::vector<std::uint8_t> permitted;  ///< [b][c]; empty means every BS may use every subchannel
  double tx_power = 1.0;              ///< W per subchannel
  double noise_power = 0.0;           ///< W per subchannel
  double subchannel_bandwidth = 1.0;  ///< Hz
  bool interference_power_literal = false;
  double epsilon = 1.0;               ///< bit/s, utility floor

  double gain_at(std::size_t c, std::size_t m, std::size_t b) const { return gain[(c * n_users + m) * n_bs + b]; }
  bool may_use(std::size_t b, std::size_t c) const { return permitted.empty() || permitted[b * n_subchannels + c]; }

  /// Throws ValidationError listing every inconsistency.
  void validate() const;
};

/// R, Y and X of one frame plus the final rate of every active tile.
class AllocationState {
 public:
  AllocationState() = default;
  AllocationState(std::size_t n_bs, std::size_t n_users, std::size_t n_subchannels, std::size_t n_slots);

  std::size_t n_bs() const { return n_bs_; }
  std::size_t n_users() const { return n_users_; }
  std::size_t n_subchannels() const { return n_subchannels_; }
  std::size_t n_slots() const { return n_slots_; }

  /// Accumulated rate of user m through slot t (bit/s).
  double rate(std::size_t m, std::size_t t) const { return rate_[t * n_users_ + m]; }
  bool active(std::size_t b, std::size_t c, std::size_t t) const { return active_[(b * n_subchannels_ + c) * n_slots_ + t]; }
  bool assigned(std::size_t m, std::size_t c, std::size_t t) const {
    return assigned_[(m * n_subchannels_ + c) * n_slots_ + t];
  }
  /// Rate of the tile served by b on (c, t) under the final pattern; 0 if idle.
  double tile_rate(std::size_t b, std::size_t c, std::size_t t) const {
    return tile_rate_[(b * n_subchannels_ + c) * n_slots_ + t];
  }
  /// Number of active (c, t) pairs of BS b.
  std::size_t assigned_count(std::size_t b) const { return counts_[b]; }

  double& rate_ref(std::size_t m, std::size_t t) { return rate_[t * n_users_ + m]; }
  void set_active(std::size_t b, std::size_t c, std::size_t t, std::size_t m, double r);
  void set_tile_rate(std::size_t b, std::size_t c, std::size_t t, double r) {
    tile_rate_[(b * n_subchannels_ + c) * n_slots_ + t] = r;
  }

  friend bool operator==(const AllocationState&, const AllocationState&) = default;

 private:
  std::size_t n_bs_ = 0, n_users_ = 0, n_subchannels_ = 0, n_slots_ = 0;
  std::vector<double> rate_;  // [t][m]
  std::vector<std::uint8_t> active_;
  std::vector<std::uint8_t> assigned_;
  std::vector<double> tile_rate_;
  std::vector<std::size_t> counts_;
};

struct UtilityDelta {
  double gain = 0.0;
  double loss = 0.0;
  double net = 0.0;
};

struct AcceptEvent {
  std::size_t bs = 0, user = 0, subchannel = 0, slot = 0;
  UtilityDelta delta;
};

struct AllocationCounters {
  std::uint64_t candidate_evaluations = 0;  ///< users scored
  std::uint64_t interference_terms = 0;     ///< gain lookups summed into interference
  std::uint64_t accepted = 0;
};

struct AllocationOptions {
  /// Called after every accepted assignment with the updated state.
  std::function<void(const AcceptEvent&, const AllocationState&)> on_accept;
  AllocationCounters* counters = nullptr;
};

/// Slots outer, then subchannels, then BSs in ascending (assigned count, id).
/// Each BS takes its best user if the net marginal utility is positive;
/// the rates of users already on the tile are then recomputed.
AllocationState allocate_frame(const SchedulingProblem& problem, const AllocationOptions& options = {});

/// Rate of user m on (c, t) if served under the current activity pattern
/// plus, optionally, BS `extra` (ignored if it serves m). Uses W_C log2(1 + SINR).
double tile_rate_under(const SchedulingProblem& problem, const AllocationState& state, std::size_t m, std::size_t c,
                       std::size_t t, std::ptrdiff_t extra = -1);

/// Marginal utility of giving (c, t) at BS b to user m, evaluated from
/// scratch against `state`. Throws DomainError unless m is served by b,
/// b may use c, and b is idle on (c, t).
UtilityDelta marginal_utility(const SchedulingProblem& problem, const AllocationState& state, std::size_t m,
                              std::size_t b, std::size_t c, std::size_t t);

/// Time-averaged rate per user over the frames: mean of R[m, T-1] / T.
std::vector<double> user_throughput(std::span<const AllocationState> frames);

/// Adds R[m, T-1] / T of one frame to `sums` (size n_users).
void accumulate_throughput(const AllocationState& frame, std::span<double> sums);

}  // namespace cellpool
