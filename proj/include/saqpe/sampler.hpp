#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "saqpe/fem.hpp"
#include "saqpe/qpe_dist.hpp"
#include "saqpe/spectrum.hpp"
#include "saqpe/torus.hpp"

namespace saqpe {

/// Counter-based pseudo-random stream (splitmix64 over a keyed counter).
/// The same (seed, stream id) always reproduces the same sequence, and
/// substreams are independently keyed, so chunked parallel sampling is
/// bit-reproducible for any thread count.
class ShotStream {
public:
    explicit ShotStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    std::uint64_t next_u64();
    double next_unit();  // [0, 1), 53-bit resolution

    /// Independently keyed child stream; pure function of (seed, stream, child).
    ShotStream substream(std::uint64_t child) const;

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// Sparse shot counts over a phase grid; absent bins have count 0.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(PhaseGrid grid) : grid_(grid) {}

    const PhaseGrid& grid() const { return grid_; }
    std::uint64_t total_shots() const { return total_; }

    void add(std::uint64_t bin, std::uint64_t count = 1);
    void merge(const EmpiricalDistribution& other);

    std::uint64_t count(std::uint64_t bin) const;
    double p_hat(std::uint64_t bin) const;

    const std::unordered_map<std::uint64_t, std::uint64_t>& counts() const {
        return counts_;
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted_counts() const;

    /// CSV rows "j,count,p_hat", sorted by j.
    void write_csv(std::ostream& out) const;
    static EmpiricalDistribution read_csv(std::istream& in, PhaseGrid grid);

private:
    PhaseGrid grid_;
    std::unordered_map<std::uint64_t, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

/// Walker alias table for O(1) categorical draws (one uniform per draw).
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& weights);
    std::size_t draw(ShotStream& rng) const;
    std::size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

/// Exact sampler for the single-mode QPE law centered at one phase:
///   p_j = sin^2(pi*N*theta) / (N^2 sin^2(pi*(theta - a_j))).
///
/// The two bins nearest the phase are proposal atoms carrying their exact
/// mass; the rest of each side is covered by a 1/x^2 envelope sampled by
/// inverse transform and rounded to integer offsets, with closed-form
/// acceptance. A phase exactly on the grid degenerates to a point mass.
class FejerModeSampler {
public:
    FejerModeSampler(double phase, const PhaseGrid& grid);

    /// Draws one bin; if `attempts` is given, it accumulates the number of
    /// proposal rounds taken (for acceptance-rate instrumentation).
    std::uint64_t draw(ShotStream& rng, std::uint64_t* attempts = nullptr) const;

    bool degenerate() const { return degenerate_; }
    const PhaseGrid& grid() const { return grid_; }

    // Envelope introspection (used by the deterministic exactness checks).
    double target_mass(std::uint64_t bin) const;    // 1/sin^2(pi*delta_j)
    double envelope_mass(std::uint64_t bin) const;  // >= target_mass everywhere
    double total_envelope() const;
    double normalizer() const;  // p_j = normalizer * target_mass(j)

private:
    PhaseGrid grid_;
    bool degenerate_ = false;
    std::uint64_t anchor_bin_ = 0;  // floor(N*theta)
    double frac_ = 0.0;             // f = N*theta - floor(N*theta)
    double comp_ = 0.0;             // g = 1 - f
    double norm_ = 1.0;             // sin^2(pi*min(f,g))/N^2
    std::uint64_t tail_len_ = 0;    // per-side tail offsets: 1..tail_len
    double atom_left_ = 0.0, atom_right_ = 0.0;
    double tail_left_ = 0.0, tail_right_ = 0.0;
    double cum_[4] = {0, 0, 0, 0};
    double total_ = 0.0;

    std::int64_t signed_offset(std::uint64_t bin) const;
};

/// K i.i.d. draws from a dense distribution via an alias table.
EmpiricalDistribution sample_enumeration(const QpeDistribution& dist,
                                         std::uint64_t shots, const ShotStream& rng,
                                         int threads = 0);

/// K draws from the weighted-mode QPE law at arbitrary grid size: draw a
/// mode by weight, then a bin from that mode's exact Fejér law.
EmpiricalDistribution sample_rejection(const Spectrum& spectrum,
                                       const ModeWeights& weights,
                                       const PhaseGrid& grid, std::uint64_t shots,
                                       const ShotStream& rng, int threads = 0);

/// The physical protocol: per shot, a uniformly random basis state j0, then a
/// bin from the conditional law p_{j|j0}. Law equals sample_rejection with
/// uniform weights by the mixture identity.
EmpiricalDistribution two_stage_sample(const StandardProblem& problem,
                                       const PhaseGrid& grid, std::uint64_t shots,
                                       const ShotStream& rng, int threads = 0);

}  // namespace saqpe
