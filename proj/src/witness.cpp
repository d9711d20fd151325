#include <algorithm>
#include <bit>

#include "regulab/engines.hpp"

namespace regulab {

namespace {

// Scaled deviation of (A, B): |e(A,B) * r * c - e * |A||B||.
struct Scored {
    std::vector<uint32_t> rows, cols;
    int64_t score = 0;
};

// Best column set for fixed rows and sign; returns the scaled deviation.
int64_t best_cols(const BitMatrix& m, const std::vector<uint32_t>& rows, int sign, int64_t rc, int64_t e,
                  std::vector<uint32_t>* out) {
    const int64_t k = static_cast<int64_t>(rows.size());
    int64_t total = 0;
    if (out) out->clear();
    for (uint32_t b = 0; b < m.cols(); ++b) {
        int64_t cnt = 0;
        for (auto a : rows) cnt += m.test(a, b);
        int64_t term = sign * (cnt * rc - e * k);
        if (term > 0) {
            total += term;
            if (out) out->push_back(b);
        }
    }
    return total;
}

int64_t best_rows(const BitMatrix& m, const std::vector<uint32_t>& cols, int sign, int64_t rc, int64_t e,
                  std::vector<uint32_t>* out) {
    const int64_t k = static_cast<int64_t>(cols.size());
    int64_t total = 0;
    if (out) out->clear();
    for (uint32_t a = 0; a < m.rows(); ++a) {
        int64_t cnt = 0;
        for (auto b : cols) cnt += m.test(a, b);
        int64_t term = sign * (cnt * rc - e * k);
        if (term > 0) {
            total += term;
            if (out) out->push_back(a);
        }
    }
    return total;
}

Scored exhaustive(const BitMatrix& m, int64_t rc, int64_t e) {
    const uint32_t r = m.rows(), c = m.cols();
    std::vector<int64_t> colcount(c, 0);
    uint64_t mask = 0, best_mask = 0;
    int best_sign = 1;
    int64_t best = 0;
    int k = 0;
    for (uint64_t g = 1; g < (uint64_t(1) << r); ++g) {
        // Gray code: flip the row at the lowest set bit of g.
        uint32_t a = static_cast<uint32_t>(std::countr_zero(g));
        bool add = !((mask >> a) & 1u);
        mask ^= uint64_t(1) << a;
        k += add ? 1 : -1;
        const Bitset& row = m.row(a);
        for (uint32_t b = 0; b < c; ++b)
            if (row.test(b)) colcount[b] += add ? 1 : -1;
        int64_t pos = 0, neg = 0;
        for (uint32_t b = 0; b < c; ++b) {
            int64_t term = colcount[b] * rc - e * k;
            if (term > 0) pos += term;
            else neg -= term;
        }
        if (pos > best) best = pos, best_mask = mask, best_sign = 1;
        if (neg > best) best = neg, best_mask = mask, best_sign = -1;
    }
    Scored s;
    for (uint32_t a = 0; a < r; ++a)
        if ((best_mask >> a) & 1u) s.rows.push_back(a);
    s.score = best_cols(m, s.rows, best_sign, rc, e, &s.cols);
    return s;
}

// Alternating best-response climb from a row seed.
Scored climb(const BitMatrix& m, std::vector<uint32_t> rows, int sign, int64_t rc, int64_t e) {
    std::vector<uint32_t> cols;
    int64_t score = 0;
    for (int it = 0; it < 32; ++it) {
        best_cols(m, rows, sign, rc, e, &cols);
        if (cols.empty()) break;
        std::vector<uint32_t> next;
        int64_t s = best_rows(m, cols, sign, rc, e, &next);
        if (next == rows || s <= score) break;
        rows = std::move(next);
        score = s;
    }
    Scored out;
    out.score = best_cols(m, rows, sign, rc, e, &out.cols);
    out.rows = std::move(rows);
    return out;
}

Scored greedy(const BitMatrix& m, int64_t rc, int64_t e) {
    const uint32_t r = m.rows(), c = m.cols();
    Scored best;
    auto consider = [&](Scored s) {
        if (s.score > best.score) best = std::move(s);
    };
    for (int sign : {1, -1}) {
        // rows whose degree deviates in the chosen direction
        std::vector<uint32_t> rows;
        for (uint32_t a = 0; a < r; ++a) {
            int64_t deg = static_cast<int64_t>(m.row(a).count());
            if (sign * (deg * rc - e * c) > 0) rows.push_back(a);
        }
        if (!rows.empty()) consider(climb(m, rows, sign, rc, e));
        // single rows catch degree-regular block structure
        for (uint32_t a = 0; a < r; ++a) consider(climb(m, {a}, sign, rc, e));
    }
    return best;
}

}  // namespace

CutWitness find_cut_witness(const BitMatrix& m0, WitnessSearch mode, uint32_t exhaustive_side) {
    CutWitness w;
    w.deviation = 0;
    if (m0.rows() == 0 || m0.cols() == 0) return w;
    bool flip = m0.cols() < m0.rows();
    const BitMatrix m = flip ? m0.transposed() : m0;
    const int64_t rc = int64_t(m.rows()) * m.cols();
    const int64_t e = static_cast<int64_t>(m.count());
    bool exact = mode == WitnessSearch::exhaustive ? m.rows() <= 24
                 : mode == WitnessSearch::greedy   ? false
                                                   : m.rows() < exhaustive_side;
    Scored s = exact ? exhaustive(m, rc, e) : greedy(m, rc, e);
    w.rows = flip ? s.cols : s.rows;
    w.cols = flip ? s.rows : s.cols;
    w.deviation = Rat(Int(static_cast<long>(s.score)), Int(rc) * rc);
    w.deviation.canonicalize();
    return w;
}

}  // namespace regulab
