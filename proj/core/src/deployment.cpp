#include "cellpool/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cellpool/errors.hpp"
#include "cellpool/random.hpp"

namespace cellpool {

namespace {

constexpr std::uint64_t kLayoutTag = 0x4C41594Full;
constexpr std::uint64_t kUserTag = 0x55534552ull;

std::size_t uniform_index(Philox4x32& gen, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform_open(gen) * static_cast<double>(n)));
}

// One operator's sites: a near-square grid with at least n cells over the
// region, n distinct cells picked at random, one jittered site per cell.
std::vector<Position> perturbed_grid(int n, const Region& region, Philox4x32& gen) {
  const double aspect = region.width / region.height;
  const auto cols = static_cast<std::size_t>(std::max(1.0, std::ceil(std::sqrt(n * aspect))));
  const auto rows = (static_cast<std::size_t>(n) + cols - 1) / cols;
  const double cw = region.width / static_cast<double>(cols);
  const double ch = region.height / static_cast<double>(rows);
  std::vector<std::size_t> cells(rows * cols);
  std::iota(cells.begin(), cells.end(), 0);
  for (std::size_t i = cells.size(); i > 1; --i) std::swap(cells[i - 1], cells[uniform_index(gen, i)]);
  constexpr double kJitter = 0.8;  // fraction of the cell the site may occupy
  std::vector<Position> out;
  for (int k = 0; k < n; ++k) {
    const std::size_t cell = cells[static_cast<std::size_t>(k)];
    const double cx = (static_cast<double>(cell % cols) + 0.5) * cw;
    const double cy = (static_cast<double>(cell / cols) + 0.5) * ch;
    out.push_back({cx + (uniform_open(gen) - 0.5) * kJitter * cw, cy + (uniform_open(gen) - 0.5) * kJitter * ch});
  }
  return out;
}

void check_region(const Region& region) {
  if (!(region.width > 0.0) || !(region.height > 0.0)) throw DomainError("region dimensions must be positive");
}

}  // namespace

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(LayoutMode m) { return m == LayoutMode::Uniform ? "uniform" : "perturbed-grid"; }

std::optional<LayoutMode> parse_layout_mode(std::string_view text) {
  if (text == "uniform") return LayoutMode::Uniform;
  if (text == "perturbed-grid") return LayoutMode::PerturbedGrid;
  return std::nullopt;
}

std::vector<BaseStation> synthesize_layout(int n1, int n2, const Region& region, std::uint64_t seed,
                                           LayoutMode mode) {
  check_region(region);
  if (n1 < 0 || n2 < 0 || n1 + n2 < 1) throw DomainError("synthesize_layout: need at least one BS");
  std::vector<BaseStation> out;
  int next_id = 0;
  for (int op = 1; op <= 2; ++op) {
    const int n = op == 1 ? n1 : n2;
    Philox4x32 gen(seed, stream_id({kLayoutTag, static_cast<std::uint64_t>(op)}));
    std::vector<Position> sites;
    if (mode == LayoutMode::PerturbedGrid && n > 0) {
      sites = perturbed_grid(n, region, gen);
    } else {
      for (int k = 0; k < n; ++k) {
        const double x = uniform_open(gen) * region.width;
        sites.push_back({x, uniform_open(gen) * region.height});
      }
    }
    for (const Position& p : sites) out.push_back({next_id++, op, p, {}});
  }
  return out;
}

std::vector<User> deploy_users(double per_cell_target, const std::vector<BaseStation>& layout,
                               const Region& region, std::uint64_t seed) {
  return deploy_users(std::array{per_cell_target, per_cell_target}, layout, region, seed);
}

std::vector<User> deploy_users(std::array<double, 2> per_cell_target, const std::vector<BaseStation>& layout,
                               const Region& region, std::uint64_t seed) {
  check_region(region);
  if (!(per_cell_target[0] > 0.0) || !(per_cell_target[1] > 0.0))
    throw DomainError("per_cell_target must be positive");
  std::vector<User> out;
  int next_id = 0;
  for (int op = 1; op <= 2; ++op) {
    const auto n_bs = std::count_if(layout.begin(), layout.end(), [op](const BaseStation& b) { return b.op == op; });
    const auto n_users = static_cast<long long>(std::ceil(per_cell_target[op - 1] * static_cast<double>(n_bs) - 1e-9));
    Philox4x32 gen(seed, stream_id({kUserTag, static_cast<std::uint64_t>(op)}));
    for (long long k = 0; k < n_users; ++k) {
      const double x = uniform_open(gen) * region.width;
      out.push_back({next_id++, op, {x, uniform_open(gen) * region.height}, -1});
    }
  }
  return out;
}

std::vector<User> associate(std::vector<User> users, const std::vector<BaseStation>& layout, Strategy strategy,
                            const Matrix<double>& avg_power) {
  if (avg_power.rows() != layout.size() || avg_power.cols() != users.size())
    throw DomainError("associate: average-power table does not match layout x users");
  std::vector<std::size_t> by_id(layout.size());
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) { return layout[a].id < layout[b].id; });
  std::vector<std::string> problems;
  for (std::size_t m = 0; m < users.size(); ++m) {
    int best = -1;
    double best_power = 0.0;
    for (std::size_t b : by_id) {
      if (strategy == Strategy::NoCoop && layout[b].op != users[m].op) continue;
      const double p = avg_power(b, m);
      if (best < 0 || p > best_power) {
        best = layout[b].id;
        best_power = p;
      }
    }
    users[m].serving_bs = best;
    if (best < 0) problems.push_back("user " + std::to_string(users[m].id) + " has no candidate base station");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return users;
}

OperatorParams implied_operator(const std::vector<BaseStation>& layout, int op, const Region& region,
                                double bandwidth, double users_per_cell) {
  const auto n = std::count_if(layout.begin(), layout.end(), [op](const BaseStation& b) { return b.op == op; });
  const double density = static_cast<double>(n) / region.area();
  return {density, bandwidth, density * users_per_cell};
}

}  // namespace cellpool
