#include "cellpool/channel.hpp"

#include <cmath>

#include "cellpool/errors.hpp"
#include "cellpool/random.hpp"

namespace cellpool {

namespace {

constexpr std::uint64_t kShadowTag = 0x5348414Full;
constexpr std::uint64_t kFadeTag = 0x46414445ull;

std::array<std::uint32_t, 2> fade_key(std::uint64_t seed) {
  const std::uint64_t k = mix64(seed ^ kFadeTag);
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

// Two subchannels share one Philox block: lanes 0-1 for even c, 2-3 for odd.
Philox4x32::Block fade_block(const std::array<std::uint32_t, 2>& key, std::uint64_t frame, int bs_id, int user_id,
                             int subchannel_pair) {
  return Philox4x32::generate({static_cast<std::uint32_t>(subchannel_pair), static_cast<std::uint32_t>(user_id),
                               static_cast<std::uint32_t>(bs_id), static_cast<std::uint32_t>(frame)},
                              key);
}

double fade_from_block(const Philox4x32::Block& block, int subchannel) {
  const int lane = (subchannel & 1) * 2;
  return -std::log(to_open_unit(block[lane], block[lane + 1]));
}

}  // namespace

std::string_view to_string(PathLossKind k) {
  return k == PathLossKind::PureExponent ? "pure-exponent" : "log-distance";
}

std::optional<PathLossModel> path_loss_preset(std::string_view name) {
  if (name == "pure-exponent") return PathLossModel::pure_exponent(3.76);
  if (name == "literal") return PathLossModel::literal();
  if (name == "urban-macro") return PathLossModel::urban_macro();
  return std::nullopt;
}

double path_loss(double d, const PathLossModel& model) {
  if (!(d > 0.0)) throw DomainError("path_loss: distance must be positive");
  if (model.kind == PathLossKind::PureExponent) return std::pow(d, -model.exponent);
  const double loss_db = model.intercept_db + model.slope_db * std::log10(d);
  return std::pow(10.0, -loss_db / 10.0);
}

Matrix<double> ChannelStatics::average_gain() const {
  Matrix<double> out(path_gain.rows(), path_gain.cols());
  for (std::size_t b = 0; b < out.rows(); ++b)
    for (std::size_t m = 0; m < out.cols(); ++m)
      out(b, m) = path_gain(b, m) * shadow(b, m) * LinkGain::kNetAntennaLinear;
  return out;
}

ChannelStatics compute_statics(const std::vector<BaseStation>& layout, const std::vector<User>& users,
                               const ChannelConfig& config, std::uint64_t seed) {
  if (!(config.min_distance > 0.0)) throw DomainError("min_distance must be positive");
  if (!(config.shadowing_sigma_db >= 0.0)) throw DomainError("shadowing sigma must be non-negative");
  ChannelStatics s{Matrix<double>(layout.size(), users.size()), Matrix<double>(layout.size(), users.size()),
                   Matrix<double>(layout.size(), users.size(), 1.0)};
  const std::uint64_t shadow_seed = mix64(seed ^ kShadowTag);
  for (std::size_t b = 0; b < layout.size(); ++b) {
    for (std::size_t m = 0; m < users.size(); ++m) {
      const double d = std::max(config.min_distance, distance(layout[b].position, users[m].position));
      s.distance(b, m) = d;
      s.path_gain(b, m) = path_loss(d, config.path_loss);
      if (config.shadowing_sigma_db > 0.0) {
        Philox4x32 gen(shadow_seed, stream_id({static_cast<std::uint64_t>(layout[b].id),
                                               static_cast<std::uint64_t>(users[m].id)}));
        s.shadow(b, m) = std::pow(10.0, config.shadowing_sigma_db * standard_normal(gen) / 10.0);
      }
    }
  }
  return s;
}

double fast_fade(std::uint64_t seed, std::uint64_t frame, int bs_id, int user_id, int subchannel) {
  return fade_from_block(fade_block(fade_key(seed), frame, bs_id, user_id, subchannel >> 1), subchannel);
}

ChannelRealization draw_channel(std::uint64_t frame_index, const std::vector<BaseStation>& layout,
                                const std::vector<User>& user_list, std::span<const int> bs_subset,
                                std::span<const int> user_subset, std::span<const int> subchannels,
                                std::uint64_t seed) {
  ChannelRealization out;
  out.bs.assign(bs_subset.begin(), bs_subset.end());
  out.users.assign(user_subset.begin(), user_subset.end());
  out.subchannels.assign(subchannels.begin(), subchannels.end());
  const std::size_t nb = out.bs.size(), nm = out.users.size(), nc = out.subchannels.size();
  out.fade.resize(nb * nm * nc);
  const auto key = fade_key(seed);
  for (std::size_t b = 0; b < nb; ++b) {
    const int bs_id = layout.at(static_cast<std::size_t>(out.bs[b])).id;
    for (std::size_t m = 0; m < nm; ++m) {
      const int user_id = user_list.at(static_cast<std::size_t>(out.users[m])).id;
      int cached_pair = -1;
      Philox4x32::Block block{};
      for (std::size_t c = 0; c < nc; ++c) {
        const int sc = out.subchannels[c];
        if ((sc >> 1) != cached_pair) {
          cached_pair = sc >> 1;
          block = fade_block(key, frame_index, bs_id, user_id, cached_pair);
        }
        out.fade[(c * nm + m) * nb + b] = fade_from_block(block, sc);
      }
    }
  }
  return out;
}

double tile_rate(double serving_gain, std::span<const double> interferer_gains, const LinkBudget& budget) {
  const double interferer_scale = budget.interference_power_literal ? 1.0 : budget.tx_power;
  double interference = 0.0;
  for (double g : interferer_gains) interference += g;
  const double sinr = budget.tx_power * serving_gain / (budget.noise_power + interferer_scale * interference);
  return budget.bandwidth * std::log2(1.0 + sinr);
}

}  // namespace cellpool
