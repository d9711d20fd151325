#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "regulab/core.hpp"
#include "regulab/poly.hpp"

namespace regulab {

// fast: OpenMP kernels on the reduced forms. naive: literal summation, kept as
// the reference the fast kernels are tested against.
enum class Mode { fast, naive };

struct DeviationFunction2 {
    uint32_t rows = 0, cols = 0;
    std::vector<Rat> table;  // row-major

    DeviationFunction2() = default;
    DeviationFunction2(uint32_t r, uint32_t c) : rows(r), cols(c), table(std::size_t(r) * c) {}
    Rat& at(uint32_t x, uint32_t y) { return table[std::size_t(x) * cols + y]; }
    const Rat& at(uint32_t x, uint32_t y) const { return table[std::size_t(x) * cols + y]; }
};

struct DeviationFunction3 {
    uint32_t nx = 0, ny = 0, nz = 0;
    std::vector<Rat> table;  // index (x*ny + y)*nz + z

    DeviationFunction3() = default;
    DeviationFunction3(uint32_t a, uint32_t b, uint32_t c) : nx(a), ny(b), nz(c), table(std::size_t(a) * b * c) {}
    Rat& at(uint32_t x, uint32_t y, uint32_t z) { return table[(std::size_t(x) * ny + y) * nz + z]; }
    const Rat& at(uint32_t x, uint32_t y, uint32_t z) const { return table[(std::size_t(x) * ny + y) * nz + z]; }
};

Rat c4_sum(const DeviationFunction2& f, Mode mode = Mode::fast);
Rat oct_sum(const DeviationFunction3& f, Mode mode = Mode::fast);

// Integer-scaled kernels: the function is num / den; results are sums of the
// scaled numerators (divide by den^4 resp. den^8 for the true value).
Int c4_sum_scaled(uint32_t rows, uint32_t cols, const std::vector<int64_t>& num, Mode mode);
Int oct_sum_scaled(uint32_t nx, uint32_t ny, uint32_t nz, const std::vector<int64_t>& num, Mode mode);

struct Certificate {
    Rat raw_sum;
    Rat normalizer;
    Rat value;  // minimal alpha (or eta) for which the predicate holds
    bool degenerate = false;

    bool holds(const Rat& threshold) const { return threshold >= value; }
};

Certificate pair_quasirandomness(const MultipartiteGraph& g, const std::vector<uint32_t>& X,
                                 const std::vector<uint32_t>& Y, Mode mode = Mode::fast);
// Pair given directly by its bipartite adjacency over the full X x Y.
Certificate pair_quasirandomness(const BitMatrix& adj, Mode mode = Mode::fast);
// Pair induced on row subset R and column subset C of adj.
Certificate pair_quasirandomness(const BitMatrix& adj, const std::vector<uint32_t>& R,
                                 const std::vector<uint32_t>& C, Mode mode = Mode::fast);

Rat multipartite_graph_quasirandomness(const MultipartiteGraph& g, Mode mode = Mode::fast);

Certificate chain_quasirandomness(const Chain& c, Mode mode = Mode::fast);
Certificate chain_quasirandomness(const DenseChain& d, Mode mode = Mode::fast);

struct TriplePartCertificate {
    std::array<uint32_t, 3> parts;
    Certificate cert;
};

struct TPartiteResult {
    bool holds = true;
    std::vector<TriplePartCertificate> certificates;
};

TPartiteResult tpartite_chain_quasirandomness(const MultipartiteGraph& g, const ThreeGraph& h, const Rat& eta,
                                              Mode mode = Mode::fast);

bool eta_psi_check(const Chain& c, const Rat& eta, const PolyFunction& psi, Mode mode = Mode::fast);

struct WeakResult {
    bool holds = true;
    std::array<std::vector<uint32_t>, 3> witness;  // violating subsets when !holds
    Rat deviation;                                 // |e' - d s1 s2 s3| / (|X1||X2||X3|) at the witness
};

constexpr uint64_t kWeakDefaultCap = uint64_t(1) << 24;

// Enumerates X1' and X2' by Gray code; the extremal X3' is read off from the
// per-vertex counts, so the cap bounds 2^(|X1| + |X2|).
WeakResult weak_quasirandom_check(const ThreeGraph& h, const std::vector<uint32_t>& X1,
                                  const std::vector<uint32_t>& X2, const std::vector<uint32_t>& X3, const Rat& eta,
                                  uint64_t cap = kWeakDefaultCap);

}  // namespace regulab
