#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace regulab {

class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }
    std::size_t words() const { return w_.size(); }
    const uint64_t* data() const { return w_.data(); }
    uint64_t* data() { return w_.data(); }

    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { w_[i >> 6] |= uint64_t(1) << (i & 63); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }
    void assign(std::size_t i, bool v) { v ? set(i) : reset(i); }
    void set_all() {
        for (auto& w : w_) w = ~uint64_t(0);
        trim();
    }
    void clear() {
        for (auto& w : w_) w = 0;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : w_) c += std::popcount(w);
        return c;
    }
    bool any() const {
        for (auto w : w_)
            if (w) return true;
        return false;
    }

    Bitset& operator&=(const Bitset& o) {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= o.w_[k];
        return *this;
    }
    Bitset& operator|=(const Bitset& o) {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
        return *this;
    }
    bool operator==(const Bitset& o) const { return n_ == o.n_ && w_ == o.w_; }

    // Index of each set bit, ascending.
    std::vector<uint32_t> indices() const {
        std::vector<uint32_t> out;
        for (std::size_t k = 0; k < w_.size(); ++k) {
            uint64_t w = w_[k];
            while (w) {
                out.push_back(static_cast<uint32_t>(k * 64 + std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

    static std::size_t and_count(const Bitset& a, const Bitset& b) {
        std::size_t c = 0;
        for (std::size_t k = 0; k < a.w_.size(); ++k) c += std::popcount(a.w_[k] & b.w_[k]);
        return c;
    }
    static std::size_t and_count(const Bitset& a, const Bitset& b, const Bitset& c) {
        std::size_t r = 0;
        for (std::size_t k = 0; k < a.w_.size(); ++k) r += std::popcount(a.w_[k] & b.w_[k] & c.w_[k]);
        return r;
    }

private:
    void trim() {
        if (n_ & 63) w_.back() &= (uint64_t(1) << (n_ & 63)) - 1;
    }

    std::size_t n_ = 0;
    std::vector<uint64_t> w_;
};

// Row-major bit matrix; row r is a Bitset over columns.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), r_(rows, Bitset(cols)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool test(std::size_t i, std::size_t j) const { return r_[i].test(j); }
    void set(std::size_t i, std::size_t j) { r_[i].set(j); }
    void assign(std::size_t i, std::size_t j, bool v) { r_[i].assign(j, v); }
    const Bitset& row(std::size_t i) const { return r_[i]; }
    Bitset& row(std::size_t i) { return r_[i]; }

    std::size_t count() const {
        std::size_t c = 0;
        for (const auto& b : r_) c += b.count();
        return c;
    }
    void set_all() {
        for (auto& b : r_) b.set_all();
    }
    BitMatrix transposed() const {
        BitMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (auto j : r_[i].indices()) t.set(j, i);
        return t;
    }
    bool operator==(const BitMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && r_ == o.r_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Bitset> r_;
};

}  // namespace regulab
