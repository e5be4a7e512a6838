#include "sparsepac/rng.hpp"

#include <sstream>

#include "sparsepac/errors.hpp"

namespace sparsepac {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw ConfigError("Rng::index: empty range");
  // Values below `threshold` are rejected so the accepted range is a multiple
  // of n.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t r = engine_();
  while (r < threshold) r = engine_();
  return static_cast<std::size_t>(r % bound);
}

std::string Rng::state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::restore(const std::string& snapshot) {
  std::istringstream is(snapshot);
  engine_type restored;
  is >> restored;
  if (!is) throw FormatError("Rng::restore: malformed engine state");
  engine_ = restored;
}

}  // namespace sparsepac
