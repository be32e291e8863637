#include <algorithm>
#include <bit>
#include <unordered_map>

#include "gensmooth/measure.hpp"

namespace gensmooth {

namespace {

// Bits of value selected by mask, packed into the low bits.
std::uint64_t compress(std::uint64_t value, std::uint64_t mask) {
  std::uint64_t out = 0;
  int pos = 0;
  for (std::uint64_t m = mask; m != 0; m &= m - 1, ++pos)
    if (value & (m & -m)) out |= std::uint64_t{1} << pos;
  return out;
}

bool shattered(const HypothesisFamily& h, std::uint64_t mask, std::size_t d, std::vector<char>& seen) {
  std::fill(seen.begin(), seen.end(), 0);
  std::size_t count = 0;
  const std::size_t want = std::size_t{1} << d;
  for (Subset f : h.members()) {
    auto& slot = seen[compress(f.mask, mask)];
    if (!slot) {
      slot = 1;
      if (++count == want) return true;
    }
  }
  return false;
}

}  // namespace

int vc_dimension(const HypothesisFamily& h, std::size_t cap) {
  const std::size_t n = h.atom_count();
  require(cap <= n, "vc cap exceeds atom count");
  int best = 0;
  std::vector<char> seen;
  for (std::size_t d = 1; d <= cap; ++d) {
    if (d >= 63 || (std::size_t{1} << d) > h.size()) break;
    seen.assign(std::size_t{1} << d, 0);
    bool found = false;
    // Gosper's hack over d-bit masks below 2^n.
    std::uint64_t mask = (std::uint64_t{1} << d) - 1;
    const std::uint64_t limit = Subset::full(n).mask;
    while (mask <= limit && mask != 0) {
      if (shattered(h, mask, d, seen)) {
        found = true;
        break;
      }
      const std::uint64_t c = mask & -mask;
      const std::uint64_t r = mask + c;
      if (r == 0) break;
      mask = (((r ^ mask) >> 2) / c) | r;
    }
    if (!found) break;
    best = static_cast<int>(d);
  }
  return best;
}

namespace {

using Members = std::vector<std::uint64_t>;

int floor_log2(std::size_t v) { return static_cast<int>(std::bit_width(v)) - 1; }  // bitset over hypothesis indices

struct MembersHash {
  std::size_t operator()(const Members& m) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::uint64_t w : m) h = (h ^ w) * 0xff51afd7ed558ccdull + (h >> 29);
    return static_cast<std::size_t>(h);
  }
};

class LittlestoneSolver {
 public:
  explicit LittlestoneSolver(const HypothesisFamily& h) : h_(h), words_((h.size() + 63) / 64) {}

  int solve() {
    Members all(words_, 0);
    for (std::size_t i = 0; i < h_.size(); ++i) all[i / 64] |= std::uint64_t{1} << (i % 64);
    return depth(all, h_.size());
  }

 private:
  int depth(const Members& s, std::size_t count) {
    if (count <= 1) return 0;
    if (const auto it = memo_.find(s); it != memo_.end()) return it->second;
    const int ceiling = floor_log2(count);
    int best = 0;
    Members zero(words_), one(words_);
    for (std::size_t x = 0; x < h_.atom_count() && best < ceiling; ++x) {
      std::size_t ones = 0;
      for (std::size_t w = 0; w < words_; ++w) {
        one[w] = 0;
        for (std::uint64_t m = s[w]; m != 0; m &= m - 1) {
          const std::size_t i = w * 64 + static_cast<std::size_t>(std::countr_zero(m));
          if (h_[i].contains(x)) one[w] |= m & -m;
        }
        zero[w] = s[w] & ~one[w];
        ones += static_cast<std::size_t>(std::popcount(one[w]));
      }
      if (ones == 0 || ones == count) continue;
      // min(a, b) + 1 can only beat best if both sides reach best.
      if (floor_log2(ones) < best || floor_log2(count - ones) < best) continue;
      const int a = depth(zero, count - ones);
      if (a < best) continue;
      const int b = depth(one, ones);
      best = std::max(best, 1 + std::min(a, b));
    }
    memo_.emplace(s, best);
    return best;
  }

  const HypothesisFamily& h_;
  std::size_t words_;
  std::unordered_map<Members, int, MembersHash> memo_;
};

}  // namespace

int littlestone_dimension(const HypothesisFamily& h) {
  if (h.size() > kMaxBehaviors) fail(ErrorCode::kCapacity, "littlestone recursion limited to 4096 behaviors");
  return LittlestoneSolver(h).solve();
}

}  // namespace gensmooth
