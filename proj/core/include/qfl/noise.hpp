#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <boost/random/normal_distribution.hpp>

namespace qfl {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of trajectory i under a master seed: splitmix64(master + golden * (i + 1)).
std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index);

/// Seed of channel c inside a trajectory: splitmix64(trajectory ^ splitmix64(c + 1)).
std::uint64_t channel_seed(std::uint64_t trajectory, std::uint64_t channel);

// Independent N(0, dt) increments, one mt19937_64 per channel.
class WienerIncrements {
 public:
  WienerIncrements(std::uint64_t trajectory, std::size_t channels, double dt);

  void draw(std::span<double> out);
  double draw(std::size_t channel);
  std::size_t channels() const { return engines_.size(); }

 private:
  std::vector<std::mt19937_64> engines_;
  boost::random::normal_distribution<double> normal_;
  double scale_;
};

}  // namespace qfl
