#pragma once

#include <cstdint>
#include <vector>

namespace latmatch {

// Dense bit set over concept ids. Sized at construction; all binary
// operations require equal sizes.
class ConceptSet {
  public:
    ConceptSet() = default;
    explicit ConceptSet(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::size_t size_bits() const { return nbits_; }

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }
    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    ConceptSet& operator&=(const ConceptSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    ConceptSet& operator|=(const ConceptSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    // Set difference: this \ o.
    ConceptSet& operator-=(const ConceptSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }

    friend ConceptSet operator&(ConceptSet a, const ConceptSet& b) { return a &= b; }
    friend ConceptSet operator|(ConceptSet a, const ConceptSet& b) { return a |= b; }
    friend ConceptSet operator-(ConceptSet a, const ConceptSet& b) { return a -= b; }

    bool operator==(const ConceptSet& o) const { return words_ == o.words_; }
    bool operator!=(const ConceptSet& o) const { return words_ != o.words_; }
    // Arbitrary total order, used to keep filter collections canonically sorted.
    bool operator<(const ConceptSet& o) const { return words_ < o.words_; }

    bool subset_of(const ConceptSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }
    bool intersects(const ConceptSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    template <typename Fn>
    void for_each(Fn fn) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w) {
                unsigned b = static_cast<unsigned>(__builtin_ctzll(w));
                fn(wi * 64 + b);
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

  private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace latmatch
