#include "qfl/noise.hpp"

#include <cmath>

#include "qfl/errors.hpp"

namespace qfl {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + kGolden * (index + 1));
}

std::uint64_t channel_seed(std::uint64_t trajectory, std::uint64_t channel) {
  return splitmix64(trajectory ^ splitmix64(channel + 1));
}

WienerIncrements::WienerIncrements(std::uint64_t trajectory, std::size_t channels, double dt)
    : normal_(0.0, 1.0), scale_(std::sqrt(dt)) {
  if (!(dt > 0.0)) throw InvalidArgument("WienerIncrements: dt must be positive");
  engines_.reserve(channels);
  for (std::size_t c = 0; c < channels; ++c) engines_.emplace_back(channel_seed(trajectory, c));
}

void WienerIncrements::draw(std::span<double> out) {
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = draw(c);
}

double WienerIncrements::draw(std::size_t channel) { return scale_ * normal_(engines_[channel]); }

}  // namespace qfl
