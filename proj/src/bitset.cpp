#include "homopart/bitset.hpp"

namespace homopart {

Bitset::Bitset(std::size_t size, bool value)
    : size_(size), words_((size + kWordBits - 1) / kWordBits, value ? ~Word{0} : Word{0}) {
  trim();
}

void Bitset::trim() noexcept {
  if (const auto tail = size_ % kWordBits; tail != 0 && !words_.empty())
    words_.back() &= (Word{1} << tail) - 1;
}

void Bitset::set_all() noexcept {
  for (auto& w : words_) w = ~Word{0};
  trim();
}

void Bitset::reset_all() noexcept {
  for (auto& w : words_) w = 0;
}

std::size_t Bitset::count() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

bool Bitset::none() const noexcept {
  for (auto w : words_)
    if (w != 0) return false;
  return true;
}

std::size_t Bitset::count_and(const Bitset& other) const noexcept {
  std::size_t total = 0;
  for (std::size_t i = 0; i < words_.size(); ++i)
    total += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
  return total;
}

std::size_t Bitset::count_xor(const Bitset& other) const noexcept {
  std::size_t total = 0;
  for (std::size_t i = 0; i < words_.size(); ++i)
    total += static_cast<std::size_t>(std::popcount(words_[i] ^ other.words_[i]));
  return total;
}

Bitset& Bitset::operator&=(const Bitset& other) noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

Bitset& Bitset::operator|=(const Bitset& other) noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

Bitset& Bitset::operator^=(const Bitset& other) noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

Bitset Bitset::operator~() const {
  Bitset out = *this;
  for (auto& w : out.words_) w = ~w;
  out.trim();
  return out;
}

std::size_t Bitset::find_next(std::size_t from) const noexcept {
  if (from >= size_) return size_;
  std::size_t w = from / kWordBits;
  Word bits = words_[w] & (~Word{0} << (from % kWordBits));
  while (true) {
    if (bits != 0) return w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits));
    if (++w == words_.size()) return size_;
    bits = words_[w];
  }
}

std::vector<std::size_t> Bitset::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each_set([&](std::size_t i) { out.push_back(i); });
  return out;
}

}  // namespace homopart
