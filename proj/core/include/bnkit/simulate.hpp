#pragma once

#include <cstdint>
#include <vector>

#include "bnkit/model.hpp"
#include "bnkit/search.hpp"

namespace bnkit {

// splitmix64: integer-exact and trivially portable, so identical seeds
// give identical case streams on every platform.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_bits() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Top 53 bits of the output over 2^53: the output/2^64 quotient
    // floored to double precision, always in [0, 1).
    double next_uniform() {
        return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// Forward sampling: per case, nodes are visited in topological order and
// each consumes exactly one uniform draw, selected by inverse CDF on its
// CPT row. Deterministic given (net, m, seed); streams are prefix-stable
// in m.
Database sample_cases(const Network& net, int m, std::uint64_t seed);

// Posterior-mean parameter fit under a uniform prior per CPT row:
// P(x_i = v_k | row j) = (alpha_jk + 1) / (N_j + r_i). Rows never seen in
// the data come out uniform.
Network fit_parameters(const Structure& s, const Database& db);

// Arc disagreement between a reference and a learned structure over the
// same variables. A reference arc with its reversal present counts as
// reversed, not missing; reversals are not double-counted as extra.
struct ArcDiff {
    int missing = 0;
    int extra = 0;
    int reversed = 0;

    int total() const { return missing + extra + reversed; }
};
ArcDiff structural_diff(const Structure& reference, const Structure& learned);

// One m-prefix outcome of the sample-then-reconstruct experiment.
struct ReconstructionRow {
    int num_cases = 0;
    ArcDiff diff;
    double seconds = 0.0;
    Structure learned;
};

// Samples max(m_schedule) cases once, then reruns the greedy search on
// each m-prefix and reports the structural differences and wall time.
std::vector<ReconstructionRow> reconstruction_experiment(const Network& reference,
                                                         const std::vector<int>& m_schedule,
                                                         std::uint64_t seed,
                                                         const SearchConfig& cfg);

}  // namespace bnkit
