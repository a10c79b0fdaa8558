#include "saqpe/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace saqpe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kShotChunk = std::uint64_t{1} << 16;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

// Deterministic chunked sampling harness shared by all samplers. `body`
// draws one shot from a stream and returns the bin.
template <typename Body>
EmpiricalDistribution run_chunked(const PhaseGrid& grid, std::uint64_t shots,
                                  const ShotStream& rng, int threads, Body&& body) {
    EmpiricalDistribution out(grid);
    if (shots == 0) return out;
    const std::uint64_t chunks = (shots + kShotChunk - 1) / kShotChunk;

    unsigned hw = std::thread::hardware_concurrency();
    std::uint64_t want = threads > 0 ? static_cast<std::uint64_t>(threads)
                                     : std::max<std::uint64_t>(hw ? hw : 1, 1);
    std::uint64_t nthreads = std::min<std::uint64_t>({want, chunks, 64});

    auto sample_chunk = [&](std::uint64_t chunk, EmpiricalDistribution& local) {
        ShotStream stream = rng.substream(chunk);
        std::uint64_t begin = chunk * kShotChunk;
        std::uint64_t end = std::min(begin + kShotChunk, shots);
        for (std::uint64_t s = begin; s < end; ++s) {
            local.add(body(stream));
        }
    };

    if (nthreads <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) sample_chunk(c, out);
        return out;
    }

    std::mutex merge_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::uint64_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t]() {
            EmpiricalDistribution local(grid);
            for (std::uint64_t c = t; c < chunks; c += nthreads) {
                sample_chunk(c, local);
            }
            std::lock_guard<std::mutex> lock(merge_mutex);
            out.merge(local);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace

ShotStream::ShotStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id) {
    key_ = mix64(mix64(seed + kGolden) ^ mix64(stream_id + 2 * kGolden));
}

std::uint64_t ShotStream::next_u64() {
    counter_ += kGolden;
    return mix64(key_ + counter_);
}

double ShotStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

ShotStream ShotStream::substream(std::uint64_t child) const {
    return ShotStream(seed_, mix64(stream_ + kGolden) ^ (child + 1));
}

void EmpiricalDistribution::add(std::uint64_t bin, std::uint64_t count) {
    if (bin >= grid_.size()) {
        throw std::out_of_range("EmpiricalDistribution: bin out of range");
    }
    counts_[bin] += count;
    total_ += count;
}

void EmpiricalDistribution::merge(const EmpiricalDistribution& other) {
    if (other.grid_.size() != grid_.size()) {
        throw std::invalid_argument("EmpiricalDistribution: grid mismatch in merge");
    }
    for (const auto& [bin, c] : other.counts_) {
        counts_[bin] += c;
    }
    total_ += other.total_;
}

std::uint64_t EmpiricalDistribution::count(std::uint64_t bin) const {
    auto it = counts_.find(bin);
    return it == counts_.end() ? 0 : it->second;
}

double EmpiricalDistribution::p_hat(std::uint64_t bin) const {
    if (total_ == 0) return 0.0;
    return static_cast<double>(count(bin)) / static_cast<double>(total_);
}

std::vector<std::pair<std::uint64_t, std::uint64_t>>
EmpiricalDistribution::sorted_counts() const {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> rows(counts_.begin(),
                                                              counts_.end());
    std::sort(rows.begin(), rows.end());
    return rows;
}

void EmpiricalDistribution::write_csv(std::ostream& out) const {
    out << "j,count,p_hat\n";
    char buf[96];
    for (const auto& [bin, c] : sorted_counts()) {
        std::snprintf(buf, sizeof(buf), "%llu,%llu,%.17g\n",
                      static_cast<unsigned long long>(bin),
                      static_cast<unsigned long long>(c),
                      static_cast<double>(c) / static_cast<double>(total_));
        out << buf;
    }
}

EmpiricalDistribution EmpiricalDistribution::read_csv(std::istream& in,
                                                      PhaseGrid grid) {
    EmpiricalDistribution out(grid);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("j,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        std::uint64_t bin = std::stoull(field);
        std::getline(row, field, ',');
        out.add(bin, std::stoull(field));
    }
    return out;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("AliasTable: empty weights");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w)) {
            throw std::invalid_argument("AliasTable: weights must be finite and >= 0");
        }
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("AliasTable: all-zero weights");

    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = weights[i] * static_cast<double>(n) / total;
    }
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        std::uint32_t s = small.back();
        small.pop_back();
        std::uint32_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::uint32_t i : large) prob_[i] = 1.0;
    for (std::uint32_t i : small) prob_[i] = 1.0;  // numerical leftovers
}

std::size_t AliasTable::draw(ShotStream& rng) const {
    double u = rng.next_unit() * static_cast<double>(prob_.size());
    auto i = static_cast<std::size_t>(u);
    if (i >= prob_.size()) i = prob_.size() - 1;
    double frac = u - static_cast<double>(i);
    return frac < prob_[i] ? i : alias_[i];
}

FejerModeSampler::FejerModeSampler(double phase, const PhaseGrid& grid) : grid_(grid) {
    const double n = static_cast<double>(grid.size());
    double scaled = TorusPoint::reduce(phase) * n;  // exact: N is a power of two
    double fl = std::floor(scaled);
    anchor_bin_ = grid.wrap(static_cast<std::int64_t>(fl));
    frac_ = scaled - fl;
    if (frac_ == 0.0) {
        degenerate_ = true;
        return;
    }
    comp_ = 1.0 - frac_;
    double fm = std::min(frac_, comp_);
    double s = std::sin(kPi * fm);
    norm_ = s * s / (n * n);
    tail_len_ = grid.size() / 2 - 1;

    auto atom = [&](double x) {
        double sx = std::sin(kPi * x / n);
        return 1.0 / (sx * sx);
    };
    atom_left_ = atom(frac_);
    atom_right_ = atom(comp_);
    if (tail_len_ > 0) {
        double len = static_cast<double>(tail_len_);
        tail_left_ = n * n / 4.0 * (1.0 / (frac_ + 0.5) - 1.0 / (frac_ + len + 0.5));
        tail_right_ = n * n / 4.0 * (1.0 / (comp_ + 0.5) - 1.0 / (comp_ + len + 0.5));
    }
    cum_[0] = atom_left_;
    cum_[1] = cum_[0] + atom_right_;
    cum_[2] = cum_[1] + tail_left_;
    cum_[3] = cum_[2] + tail_right_;
    total_ = cum_[3];
}

std::int64_t FejerModeSampler::signed_offset(std::uint64_t bin) const {
    // offset d such that bin = anchor - d (d >= 0, left side) or
    // bin = anchor + 1 + t (t >= 0, right side, returned as -(t+1)).
    auto n = static_cast<std::int64_t>(grid_.size());
    std::int64_t rel = (static_cast<std::int64_t>(anchor_bin_) -
                        static_cast<std::int64_t>(grid_.wrap(static_cast<std::int64_t>(bin)))) %
                       n;
    if (rel < 0) rel += n;
    // rel in [0, N): left offsets are 0..N/2-1, the rest reach around the torus
    if (rel <= static_cast<std::int64_t>(tail_len_)) return rel;
    return rel - n;  // negative: right side, bin = anchor + (n - rel)
}

double FejerModeSampler::target_mass(std::uint64_t bin) const {
    if (degenerate_) return bin == anchor_bin_ ? 1.0 : 0.0;
    const double n = static_cast<double>(grid_.size());
    std::int64_t off = signed_offset(bin);
    double dist = off >= 0 ? (frac_ + static_cast<double>(off))
                           : (comp_ + static_cast<double>(-off - 1));
    double s = std::sin(kPi * dist / n);
    return 1.0 / (s * s);
}

double FejerModeSampler::envelope_mass(std::uint64_t bin) const {
    if (degenerate_) return bin == anchor_bin_ ? 1.0 : 0.0;
    const double n = static_cast<double>(grid_.size());
    std::int64_t off = signed_offset(bin);
    if (off == 0) return atom_left_;
    if (off == -1) return atom_right_;
    double base = off > 0 ? frac_ : comp_;
    double d = off > 0 ? static_cast<double>(off) : static_cast<double>(-off - 1);
    double x = base + d;
    return n * n / 4.0 / (x * x - 0.25);
}

double FejerModeSampler::total_envelope() const { return degenerate_ ? 1.0 : total_; }

double FejerModeSampler::normalizer() const { return degenerate_ ? 1.0 : norm_; }

std::uint64_t FejerModeSampler::draw(ShotStream& rng, std::uint64_t* attempts) const {
    if (degenerate_) {
        if (attempts != nullptr) ++*attempts;
        return anchor_bin_;
    }
    const double n = static_cast<double>(grid_.size());
    const auto anchor = static_cast<std::int64_t>(anchor_bin_);
    for (;;) {
        if (attempts != nullptr) ++*attempts;
        double u = rng.next_unit() * total_;
        if (u < cum_[0]) return anchor_bin_;
        if (u < cum_[1]) return grid_.wrap(anchor + 1);

        bool left = u < cum_[2];
        double base = left ? frac_ : comp_;
        double lo = base + 0.5;
        double hi = base + static_cast<double>(tail_len_) + 0.5;
        // inverse transform of the 1/x^2 density on [lo, hi]
        double v = rng.next_unit();
        double x = 1.0 / (1.0 / lo - v * (1.0 / lo - 1.0 / hi));
        auto d = static_cast<std::int64_t>(std::llround(x - base));
        d = std::clamp<std::int64_t>(d, 1, static_cast<std::int64_t>(tail_len_));

        double dist = base + static_cast<double>(d);
        double s = std::sin(kPi * dist / n);
        double target = 1.0 / (s * s);
        double envelope = n * n / 4.0 / (dist * dist - 0.25);
        if (rng.next_unit() * envelope < target) {
            return left ? grid_.wrap(anchor - d) : grid_.wrap(anchor + 1 + d);
        }
    }
}

EmpiricalDistribution sample_enumeration(const QpeDistribution& dist,
                                         std::uint64_t shots, const ShotStream& rng,
                                         int threads) {
    AliasTable table(dist.dense());
    return run_chunked(dist.grid(), shots, rng, threads, [&](ShotStream& stream) {
        return static_cast<std::uint64_t>(table.draw(stream));
    });
}

EmpiricalDistribution sample_rejection(const Spectrum& spectrum,
                                       const ModeWeights& weights,
                                       const PhaseGrid& grid, std::uint64_t shots,
                                       const ShotStream& rng, int threads) {
    if (weights.size() != spectrum.count()) {
        throw std::invalid_argument("sample_rejection: weight/phase count mismatch");
    }
    AliasTable modes(weights.values());
    std::vector<FejerModeSampler> samplers;
    samplers.reserve(spectrum.count());
    for (std::size_t k = 0; k < spectrum.count(); ++k) {
        samplers.emplace_back(spectrum.phase(k), grid);
    }
    return run_chunked(grid, shots, rng, threads, [&](ShotStream& stream) {
        return samplers[modes.draw(stream)].draw(stream);
    });
}

EmpiricalDistribution two_stage_sample(const StandardProblem& problem,
                                       const PhaseGrid& grid, std::uint64_t shots,
                                       const ShotStream& rng, int threads) {
    std::vector<AliasTable> rows;
    rows.reserve(problem.m0);
    for (std::size_t j0 = 0; j0 < problem.m0; ++j0) {
        rows.emplace_back(problem.overlap_weights(j0));
    }
    std::vector<FejerModeSampler> samplers;
    samplers.reserve(problem.m0);
    for (std::size_t k = 0; k < problem.m0; ++k) {
        samplers.emplace_back(problem.spectrum.phase(k), grid);
    }
    const double m0 = static_cast<double>(problem.m0);
    return run_chunked(grid, shots, rng, threads, [&](ShotStream& stream) {
        auto j0 = static_cast<std::size_t>(stream.next_unit() * m0);
        if (j0 >= rows.size()) j0 = rows.size() - 1;
        return samplers[rows[j0].draw(stream)].draw(stream);
    });
}

}  // namespace saqpe
