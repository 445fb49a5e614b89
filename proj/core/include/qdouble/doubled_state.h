// Copyright 2026 The qdouble Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QDOUBLE_DOUBLED_STATE_H
#define QDOUBLE_DOUBLED_STATE_H

#include <algorithm>
#include <cmath>
#include <complex>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "qdouble/group.h"
#include "qdouble/lattice.h"

namespace qdouble {

using Amplitude = std::complex<double>;

/// Process-wide knobs of the state engine. Results do not depend on `threads`
/// beyond floating point summation order.
struct EngineOptions {
    std::size_t threads = 1;
    double prune_threshold = 1e-14;
};

const EngineOptions &engine_options();
void set_engine_options(const EngineOptions &options);

/// A group together with the lattice it lives on, plus the packing scheme for
/// doubled configurations. Shared immutably by every state built on it.
///
/// A doubled configuration is a flat array of 2E elements: ket edges first,
/// then bra edges.
class Model {
   public:
    Model(FiniteGroup group, Lattice lattice);

    const FiniteGroup &group() const { return group_; }
    const Lattice &lattice() const { return lattice_; }

    std::size_t edge_count() const { return lattice_.edge_count(); }
    std::size_t config_size() const { return 2 * lattice_.edge_count(); }
    std::size_t words_per_config() const { return words_; }

    /// |G|^E, the dimension of one layer.
    double layer_dimension() const;

    void pack(std::span<const Element> config, std::uint64_t *words) const;
    void unpack(const std::uint64_t *words, std::span<Element> config) const;

   private:
    FiniteGroup group_;
    Lattice lattice_;
    unsigned bits_;
    std::size_t per_word_;
    std::size_t words_;
};

using ModelPtr = std::shared_ptr<const Model>;

ModelPtr make_model(FiniteGroup group, Lattice lattice);

/// One basis state of the doubled space.
struct DoubledConfig {
    std::vector<Element> ket;
    std::vector<Element> bra;

    bool operator==(const DoubledConfig &) const = default;
};

namespace detail {

/// Hash of a packed configuration. Tables index slots with the low bits and
/// transform picks shards with the high bits.
std::uint64_t hash_key(const std::uint64_t *key, std::size_t stride);

/// Open-addressing map from packed configurations to amplitudes. Entries keep
/// insertion order, which makes iteration deterministic.
class ConfigTable {
   public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit ConfigTable(std::size_t stride);

    std::size_t size() const { return values_.size(); }
    std::size_t stride() const { return stride_; }
    const std::uint64_t *key(std::size_t i) const { return keys_.data() + i * stride_; }
    Amplitude value(std::size_t i) const { return values_[i]; }

    std::size_t find(const std::uint64_t *key) const;
    void accumulate(const std::uint64_t *key, Amplitude value);
    void reserve(std::size_t n);
    /// Drops entries with |value| < eps, preserving order.
    void prune(double eps);

   private:
    std::size_t hash(const std::uint64_t *key) const;
    void rehash(std::size_t capacity);

    std::size_t stride_;
    std::vector<std::uint64_t> keys_;
    std::vector<Amplitude> values_;
    std::vector<std::uint32_t> slots_;
    std::size_t mask_ = 0;
};

}  // namespace detail

/// Sparse vectorized density matrix: amplitude(ket, bra) = rho[ket][bra].
///
/// States are tracked unnormalized; trace_of_rho is preserved by channels and
/// normalization happens only where a comparison needs it.
class SparseState {
   public:
    explicit SparseState(ModelPtr model);

    const Model &model() const { return *model_; }
    const ModelPtr &model_ptr() const { return model_; }

    std::size_t size() const { return table_.size(); }
    Amplitude amplitude(std::size_t i) const { return table_.value(i); }
    void unpack(std::size_t i, std::span<Element> config) const { model_->unpack(table_.key(i), config); }
    DoubledConfig config(std::size_t i) const;

    Amplitude amplitude_of(std::span<const Element> config) const;
    Amplitude amplitude_of(const DoubledConfig &config) const;

    /// Adds `amp` to the amplitude stored for `config`.
    void add(std::span<const Element> config, Amplitude amp);
    void add(const DoubledConfig &config, Amplitude amp);

    const detail::ConfigTable &table() const { return table_; }
    detail::ConfigTable &mutable_table() { return table_; }

   private:
    ModelPtr model_;
    detail::ConfigTable table_;
};

namespace detail {

/// Neumaier summation. Large states sum millions of tiny amplitudes, where a
/// plain running sum drifts by ~1e-11.
class CompensatedSum {
   public:
    void add(double x) {
        double t = sum_ + x;
        carry_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

   private:
    double sum_ = 0;
    double carry_ = 0;
};

class CompensatedComplexSum {
   public:
    void add(Amplitude x) {
        re_.add(x.real());
        im_.add(x.imag());
    }
    Amplitude value() const { return {re_.value(), im_.value()}; }

   private:
    CompensatedSum re_;
    CompensatedSum im_;
};

void check_config(const Model &model, std::span<const Element> config);

/// Runs task(0) .. task(count - 1) on up to `threads` workers.
void run_tasks(std::size_t count, std::size_t threads, const std::function<void(std::size_t)> &task);

/// Emitted terms bound for one shard, in emission order.
struct TermBuffer {
    std::vector<std::uint64_t> keys;
    std::vector<Amplitude> values;

    void clear() {
        keys.clear();
        values.clear();
    }
};

inline constexpr std::size_t kShardBits = 6;
inline constexpr std::size_t kShards = std::size_t{1} << kShardBits;
/// Inputs per block and sub-blocks per block for sharded transforms.
inline constexpr std::size_t kBlockSize = std::size_t{1} << 15;
inline constexpr std::size_t kSubBlocks = 16;
/// Below this many inputs transform runs in one pass.
inline constexpr std::size_t kShardedMin = std::size_t{1} << 14;
/// Inputs per partial sum in transform_inner.
inline constexpr std::size_t kInnerChunk = 4096;

template <typename Fanout>
void transform_range(const SparseState &in, std::size_t begin, std::size_t end, Fanout &fanout, ConfigTable &out) {
    const Model &model = in.model();
    std::vector<Element> config(model.config_size());
    std::vector<Element> scratch(model.config_size());
    std::vector<std::uint64_t> key(model.words_per_config());
    auto emit = [&](std::span<const Element> c, Amplitude amp) {
        model.pack(c, key.data());
        out.accumulate(key.data(), amp);
    };
    for (std::size_t i = begin; i < end; i++) {
        in.unpack(i, config);
        fanout(std::span<const Element>(config), std::span<Element>(scratch), in.amplitude(i), emit);
    }
}

template <typename Fanout>
void scatter_range(const SparseState &in, std::size_t begin, std::size_t end, Fanout &fanout,
                   std::span<TermBuffer> shards) {
    const Model &model = in.model();
    const std::size_t stride = model.words_per_config();
    std::vector<Element> config(model.config_size());
    std::vector<Element> scratch(model.config_size());
    std::vector<std::uint64_t> key(stride);
    auto emit = [&](std::span<const Element> c, Amplitude amp) {
        model.pack(c, key.data());
        TermBuffer &b = shards[hash_key(key.data(), stride) >> (64 - kShardBits)];
        b.keys.insert(b.keys.end(), key.begin(), key.end());
        b.values.push_back(amp);
    };
    for (std::size_t i = begin; i < end; i++) {
        in.unpack(i, config);
        fanout(std::span<const Element>(config), std::span<Element>(scratch), in.amplitude(i), emit);
    }
}

}  // namespace detail

/// Applies a linear map given entry by entry. `fanout(config, scratch, amp,
/// emit)` calls `emit(out_config, out_amp)` once per output term; outputs are
/// merged additively and pruned at the engine threshold.
///
/// Large inputs are processed in fixed blocks: terms are scattered into hash
/// shards in parallel, then each shard is accumulated by one worker in
/// emission order. Block and shard layout do not depend on the thread count,
/// so results are bitwise identical for any number of threads.
template <typename Fanout>
SparseState transform(const SparseState &in, Fanout &&fanout) {
    const EngineOptions &options = engine_options();
    SparseState result(in.model_ptr());
    auto &table = result.mutable_table();
    const std::size_t n = in.size();
    const std::size_t stride = in.model().words_per_config();
    if (n < detail::kShardedMin) {
        table.reserve(n);
        detail::transform_range(in, 0, n, fanout, table);
        table.prune(options.prune_threshold);
        return result;
    }
    std::vector<detail::ConfigTable> shard_tables(detail::kShards, detail::ConfigTable(stride));
    std::vector<std::vector<detail::TermBuffer>> buffers(detail::kSubBlocks,
                                                         std::vector<detail::TermBuffer>(detail::kShards));
    for (std::size_t block = 0; block < n; block += detail::kBlockSize) {
        const std::size_t block_end = std::min(n, block + detail::kBlockSize);
        const std::size_t len = block_end - block;
        detail::run_tasks(detail::kSubBlocks, options.threads, [&](std::size_t s) {
            for (auto &b : buffers[s]) {
                b.clear();
            }
            auto local = fanout;
            detail::scatter_range(in, block + len * s / detail::kSubBlocks, block + len * (s + 1) / detail::kSubBlocks,
                                  local, buffers[s]);
        });
        detail::run_tasks(detail::kShards, options.threads, [&](std::size_t shard) {
            auto &t = shard_tables[shard];
            for (const auto &sub : buffers) {
                const auto &b = sub[shard];
                for (std::size_t i = 0; i < b.values.size(); i++) {
                    t.accumulate(b.keys.data() + i * stride, b.values[i]);
                }
            }
        });
    }
    buffers.clear();
    std::size_t total = 0;
    for (auto &t : shard_tables) {
        t.prune(options.prune_threshold);
        total += t.size();
    }
    table.reserve(total);
    for (auto &t : shard_tables) {
        for (std::size_t i = 0; i < t.size(); i++) {
            table.accumulate(t.key(i), t.value(i));
        }
        t = detail::ConfigTable(stride);
    }
    return result;
}

/// <bra| F |in> for the map F given as a fanout (see transform), computed by
/// lookups without materializing F|in>. Partial sums cover fixed input chunks
/// and are combined in chunk order, so the result does not depend on the
/// thread count.
template <typename Fanout>
Amplitude transform_inner(const SparseState &bra, const SparseState &in, Fanout &&fanout) {
    const Model &model = in.model();
    const std::size_t n = in.size();
    const std::size_t stride = model.words_per_config();
    const std::size_t chunks = (n + detail::kInnerChunk - 1) / detail::kInnerChunk;
    const bool same = &bra == &in;
    std::vector<Amplitude> partial(chunks);
    detail::run_tasks(chunks, engine_options().threads, [&](std::size_t c) {
        std::vector<Element> config(model.config_size());
        std::vector<Element> scratch(model.config_size());
        std::vector<std::uint64_t> key(stride);
        detail::CompensatedComplexSum sum;
        std::size_t current = 0;
        auto emit = [&](std::span<const Element> out, Amplitude amp) {
            // Terms that keep the entry in place need no lookup.
            if (same && std::equal(out.begin(), out.end(), config.begin())) {
                sum.add(std::conj(in.amplitude(current)) * amp);
                return;
            }
            model.pack(out, key.data());
            std::size_t j = bra.table().find(key.data());
            if (j != detail::ConfigTable::npos) {
                sum.add(std::conj(bra.amplitude(j)) * amp);
            }
        };
        auto local = fanout;
        const std::size_t end = std::min(n, (c + 1) * detail::kInnerChunk);
        for (std::size_t i = c * detail::kInnerChunk; i < end; i++) {
            current = i;
            in.unpack(i, config);
            local(std::span<const Element>(config), std::span<Element>(scratch), in.amplitude(i), emit);
        }
        partial[c] = sum.value();
    });
    detail::CompensatedComplexSum total;
    for (Amplitude p : partial) {
        total.add(p);
    }
    return total.value();
}

/// Product state with the identity on every edge of both layers.
SparseState initial_state(ModelPtr model);

/// Single basis configuration with the given amplitude.
SparseState basis_state(ModelPtr model, const DoubledConfig &config, Amplitude amp = 1.0);

/// sum_c conj(a_c) b_c
Amplitude inner(const SparseState &a, const SparseState &b);
double norm(const SparseState &state);
/// Throws std::domain_error on the zero state.
SparseState normalize(const SparseState &state);
SparseState prune(const SparseState &state, double eps);
SparseState scale(const SparseState &state, Amplitude factor);
/// ca * a + cb * b
SparseState linear_combination(Amplitude ca, const SparseState &a, Amplitude cb, const SparseState &b);
/// ||a - b||
double distance(const SparseState &a, const SparseState &b);

/// Sum of amplitudes on configurations with ket == bra.
Amplitude trace_of_rho(const SparseState &state);
/// <I|state>/||state|| with |I> = D^-1/2 sum_i |i>|i>.
Amplitude overlap_with_I(const SparseState &state);
/// max |amp(ket, bra) - conj(amp(bra, ket))|, missing entries count as 0.
double hermiticity_defect(const SparseState &state);

/// Explicit density matrix for small systems. Row/column index of a layer
/// configuration is sum_e c_e |G|^e.
struct DenseDensity {
    static constexpr std::size_t kMaxDimension = 4096;
    Eigen::MatrixXcd matrix;
};

std::size_t dense_index(const Model &model, std::span<const Element> layer);
std::vector<Element> dense_config(const Model &model, std::size_t index);

/// Throws std::length_error when |G|^E exceeds DenseDensity::kMaxDimension.
DenseDensity to_dense(const SparseState &state);
SparseState from_dense(ModelPtr model, const Eigen::MatrixXcd &matrix);
/// max(0, -lambda_min) of the hermitian part.
double psd_defect(const DenseDensity &rho);
double hermiticity_defect(const DenseDensity &rho);

}  // namespace qdouble

#endif
