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

#include "qdouble/doubled_state.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <stdexcept>

namespace qdouble {

namespace {

EngineOptions g_engine_options;

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

}  // namespace

const EngineOptions &engine_options() {
    return g_engine_options;
}

void set_engine_options(const EngineOptions &options) {
    if (options.threads == 0) {
        throw std::invalid_argument("engine thread count must be at least 1");
    }
    if (!(options.prune_threshold >= 0)) {
        throw std::invalid_argument("prune threshold must be non-negative");
    }
    g_engine_options = options;
}

Model::Model(FiniteGroup group, Lattice lattice) : group_(std::move(group)), lattice_(std::move(lattice)) {
    bits_ = std::max(1u, static_cast<unsigned>(std::bit_width(group_.order() - 1)));
    per_word_ = 64 / bits_;
    words_ = std::max<std::size_t>(1, (config_size() + per_word_ - 1) / per_word_);
}

double Model::layer_dimension() const {
    return std::pow(static_cast<double>(group_.order()), static_cast<double>(lattice_.edge_count()));
}

void Model::pack(std::span<const Element> config, std::uint64_t *words) const {
    std::memset(words, 0, words_ * sizeof(std::uint64_t));
    std::size_t w = 0;
    std::size_t slot = 0;
    for (Element z : config) {
        words[w] |= static_cast<std::uint64_t>(z) << (bits_ * slot);
        if (++slot == per_word_) {
            slot = 0;
            w++;
        }
    }
}

void Model::unpack(const std::uint64_t *words, std::span<Element> config) const {
    const std::uint64_t mask = (std::uint64_t{1} << bits_) - 1;
    std::size_t w = 0;
    std::size_t slot = 0;
    for (Element &z : config) {
        z = static_cast<Element>((words[w] >> (bits_ * slot)) & mask);
        if (++slot == per_word_) {
            slot = 0;
            w++;
        }
    }
}

ModelPtr make_model(FiniteGroup group, Lattice lattice) {
    return std::make_shared<const Model>(std::move(group), std::move(lattice));
}

namespace detail {

ConfigTable::ConfigTable(std::size_t stride) : stride_(stride) {
    rehash(16);
}

std::uint64_t hash_key(const std::uint64_t *key, std::size_t stride) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (std::size_t w = 0; w < stride; w++) {
        h = mix64(h ^ key[w]);
    }
    return h;
}

void run_tasks(std::size_t count, std::size_t threads, const std::function<void(std::size_t)> &task) {
    const std::size_t workers = std::min(threads, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; i++) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto loop = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; w++) {
        pool.emplace_back(loop);
    }
    loop();
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::size_t ConfigTable::hash(const std::uint64_t *key) const {
    return static_cast<std::size_t>(hash_key(key, stride_));
}

void ConfigTable::rehash(std::size_t capacity) {
    slots_.assign(capacity, 0);
    mask_ = capacity - 1;
    for (std::size_t i = 0; i < values_.size(); i++) {
        std::size_t s = hash(key(i)) & mask_;
        while (slots_[s] != 0) {
            s = (s + 1) & mask_;
        }
        slots_[s] = static_cast<std::uint32_t>(i + 1);
    }
}

void ConfigTable::reserve(std::size_t n) {
    keys_.reserve(n * stride_);
    values_.reserve(n);
    std::size_t capacity = slots_.size();
    while (capacity < 2 * n) {
        capacity *= 2;
    }
    if (capacity != slots_.size()) {
        rehash(capacity);
    }
}

std::size_t ConfigTable::find(const std::uint64_t *key) const {
    std::size_t s = hash(key) & mask_;
    while (true) {
        std::uint32_t slot = slots_[s];
        if (slot == 0) {
            return npos;
        }
        if (std::memcmp(keys_.data() + (slot - 1) * stride_, key, stride_ * sizeof(std::uint64_t)) == 0) {
            return slot - 1;
        }
        s = (s + 1) & mask_;
    }
}

void ConfigTable::accumulate(const std::uint64_t *key, Amplitude value) {
    std::size_t s = hash(key) & mask_;
    while (true) {
        std::uint32_t slot = slots_[s];
        if (slot == 0) {
            break;
        }
        if (std::memcmp(keys_.data() + (slot - 1) * stride_, key, stride_ * sizeof(std::uint64_t)) == 0) {
            values_[slot - 1] += value;
            return;
        }
        s = (s + 1) & mask_;
    }
    if (values_.size() >= UINT32_MAX - 1) {
        throw std::length_error("configuration table is full");
    }
    keys_.insert(keys_.end(), key, key + stride_);
    values_.push_back(value);
    slots_[s] = static_cast<std::uint32_t>(values_.size());
    if (2 * values_.size() > slots_.size()) {
        rehash(2 * slots_.size());
    }
}

void ConfigTable::prune(double eps) {
    if (eps <= 0) {
        return;
    }
    std::size_t kept = 0;
    for (std::size_t i = 0; i < values_.size(); i++) {
        if (std::abs(values_[i]) < eps) {
            continue;
        }
        if (kept != i) {
            values_[kept] = values_[i];
            std::memmove(keys_.data() + kept * stride_, keys_.data() + i * stride_, stride_ * sizeof(std::uint64_t));
        }
        kept++;
    }
    if (kept == values_.size()) {
        return;
    }
    values_.resize(kept);
    keys_.resize(kept * stride_);
    rehash(slots_.size());
}

void check_config(const Model &model, std::span<const Element> config) {
    if (config.size() != model.config_size()) {
        throw std::invalid_argument("configuration has " + std::to_string(config.size()) + " entries, expected " +
                                    std::to_string(model.config_size()));
    }
    for (Element g : config) {
        if (g >= model.group().order()) {
            throw std::out_of_range("configuration holds an element outside the group");
        }
    }
}

}  // namespace detail

namespace {

std::vector<Element> flatten(const Model &model, const DoubledConfig &config) {
    if (config.ket.size() != model.edge_count() || config.bra.size() != model.edge_count()) {
        throw std::invalid_argument("doubled configuration layers must have one element per edge");
    }
    std::vector<Element> flat(config.ket);
    flat.insert(flat.end(), config.bra.begin(), config.bra.end());
    return flat;
}

}  // namespace

SparseState::SparseState(ModelPtr model) : model_(std::move(model)), table_(model_->words_per_config()) {
}

DoubledConfig SparseState::config(std::size_t i) const {
    std::vector<Element> flat(model_->config_size());
    unpack(i, flat);
    std::size_t e = model_->edge_count();
    return {std::vector<Element>(flat.begin(), flat.begin() + e), std::vector<Element>(flat.begin() + e, flat.end())};
}

Amplitude SparseState::amplitude_of(std::span<const Element> config) const {
    detail::check_config(*model_, config);
    std::vector<std::uint64_t> key(model_->words_per_config());
    model_->pack(config, key.data());
    std::size_t i = table_.find(key.data());
    return i == detail::ConfigTable::npos ? Amplitude{} : table_.value(i);
}

Amplitude SparseState::amplitude_of(const DoubledConfig &config) const {
    return amplitude_of(flatten(*model_, config));
}

void SparseState::add(std::span<const Element> config, Amplitude amp) {
    detail::check_config(*model_, config);
    std::vector<std::uint64_t> key(model_->words_per_config());
    model_->pack(config, key.data());
    table_.accumulate(key.data(), amp);
}

void SparseState::add(const DoubledConfig &config, Amplitude amp) {
    add(flatten(*model_, config), amp);
}

SparseState initial_state(ModelPtr model) {
    std::vector<Element> config(model->config_size(), kIdentity);
    SparseState state(std::move(model));
    state.add(config, 1.0);
    return state;
}

SparseState basis_state(ModelPtr model, const DoubledConfig &config, Amplitude amp) {
    SparseState state(std::move(model));
    state.add(config, amp);
    return state;
}

namespace {

void require_same_model(const SparseState &a, const SparseState &b) {
    if (a.model_ptr() != b.model_ptr()) {
        throw std::invalid_argument("states belong to different models");
    }
}

}  // namespace

Amplitude inner(const SparseState &a, const SparseState &b) {
    require_same_model(a, b);
    const auto &small = a.size() <= b.size() ? a.table() : b.table();
    const auto &large = a.size() <= b.size() ? b.table() : a.table();
    bool a_is_small = a.size() <= b.size();
    detail::CompensatedComplexSum total;
    for (std::size_t i = 0; i < small.size(); i++) {
        std::size_t j = large.find(small.key(i));
        if (j == detail::ConfigTable::npos) {
            continue;
        }
        Amplitude av = a_is_small ? small.value(i) : large.value(j);
        Amplitude bv = a_is_small ? large.value(j) : small.value(i);
        total.add(std::conj(av) * bv);
    }
    return total.value();
}

double norm(const SparseState &state) {
    detail::CompensatedSum total;
    for (std::size_t i = 0; i < state.size(); i++) {
        total.add(std::norm(state.amplitude(i)));
    }
    return std::sqrt(total.value());
}

SparseState scale(const SparseState &state, Amplitude factor) {
    SparseState result(state.model_ptr());
    auto &table = result.mutable_table();
    table.reserve(state.size());
    for (std::size_t i = 0; i < state.size(); i++) {
        table.accumulate(state.table().key(i), factor * state.amplitude(i));
    }
    return result;
}

SparseState normalize(const SparseState &state) {
    double n = norm(state);
    if (n == 0) {
        throw std::domain_error("cannot normalize the zero state");
    }
    return scale(state, 1.0 / n);
}

SparseState prune(const SparseState &state, double eps) {
    SparseState result = scale(state, 1.0);
    result.mutable_table().prune(eps);
    return result;
}

SparseState linear_combination(Amplitude ca, const SparseState &a, Amplitude cb, const SparseState &b) {
    require_same_model(a, b);
    SparseState result(a.model_ptr());
    auto &table = result.mutable_table();
    table.reserve(a.size() + b.size());
    for (std::size_t i = 0; i < a.size(); i++) {
        table.accumulate(a.table().key(i), ca * a.amplitude(i));
    }
    for (std::size_t i = 0; i < b.size(); i++) {
        table.accumulate(b.table().key(i), cb * b.amplitude(i));
    }
    table.prune(engine_options().prune_threshold);
    return result;
}

double distance(const SparseState &a, const SparseState &b) {
    require_same_model(a, b);
    detail::CompensatedSum total;
    for (std::size_t i = 0; i < a.size(); i++) {
        std::size_t j = b.table().find(a.table().key(i));
        Amplitude other = j == detail::ConfigTable::npos ? Amplitude{} : b.amplitude(j);
        total.add(std::norm(a.amplitude(i) - other));
    }
    for (std::size_t j = 0; j < b.size(); j++) {
        if (a.table().find(b.table().key(j)) == detail::ConfigTable::npos) {
            total.add(std::norm(b.amplitude(j)));
        }
    }
    return std::sqrt(total.value());
}

Amplitude trace_of_rho(const SparseState &state) {
    const std::size_t e = state.model().edge_count();
    std::vector<Element> config(state.model().config_size());
    detail::CompensatedComplexSum total;
    for (std::size_t i = 0; i < state.size(); i++) {
        state.unpack(i, config);
        if (std::equal(config.begin(), config.begin() + e, config.begin() + e)) {
            total.add(state.amplitude(i));
        }
    }
    return total.value();
}

Amplitude overlap_with_I(const SparseState &state) {
    double n = norm(state);
    if (n == 0) {
        throw std::domain_error("overlap_with_I of the zero state");
    }
    return trace_of_rho(state) / (std::sqrt(state.model().layer_dimension()) * n);
}

double hermiticity_defect(const SparseState &state) {
    const Model &model = state.model();
    const std::size_t e = model.edge_count();
    std::vector<Element> config(model.config_size());
    std::vector<Element> mirrored(model.config_size());
    std::vector<std::uint64_t> key(model.words_per_config());
    double worst = 0;
    for (std::size_t i = 0; i < state.size(); i++) {
        state.unpack(i, config);
        std::copy(config.begin() + e, config.end(), mirrored.begin());
        std::copy(config.begin(), config.begin() + e, mirrored.begin() + e);
        model.pack(mirrored, key.data());
        std::size_t j = state.table().find(key.data());
        Amplitude partner = j == detail::ConfigTable::npos ? Amplitude{} : state.amplitude(j);
        worst = std::max(worst, std::abs(state.amplitude(i) - std::conj(partner)));
    }
    return worst;
}

std::size_t dense_index(const Model &model, std::span<const Element> layer) {
    std::size_t index = 0;
    std::size_t radix = 1;
    for (Element g : layer) {
        index += g * radix;
        radix *= model.group().order();
    }
    return index;
}

std::vector<Element> dense_config(const Model &model, std::size_t index) {
    std::vector<Element> layer(model.edge_count());
    for (auto &g : layer) {
        g = static_cast<Element>(index % model.group().order());
        index /= model.group().order();
    }
    return layer;
}

namespace {

std::size_t checked_dense_dimension(const Model &model) {
    if (model.layer_dimension() > static_cast<double>(DenseDensity::kMaxDimension)) {
        throw std::length_error("dense density matrix would have dimension " +
                                std::to_string(model.layer_dimension()) + " > " +
                                std::to_string(DenseDensity::kMaxDimension));
    }
    return static_cast<std::size_t>(std::llround(model.layer_dimension()));
}

}  // namespace

DenseDensity to_dense(const SparseState &state) {
    const Model &model = state.model();
    const std::size_t dim = checked_dense_dimension(model);
    const std::size_t e = model.edge_count();
    DenseDensity rho{Eigen::MatrixXcd::Zero(dim, dim)};
    std::vector<Element> config(model.config_size());
    for (std::size_t i = 0; i < state.size(); i++) {
        state.unpack(i, config);
        std::span<const Element> flat(config);
        rho.matrix(dense_index(model, flat.first(e)), dense_index(model, flat.subspan(e))) += state.amplitude(i);
    }
    return rho;
}

SparseState from_dense(ModelPtr model, const Eigen::MatrixXcd &matrix) {
    const std::size_t dim = checked_dense_dimension(*model);
    if (static_cast<std::size_t>(matrix.rows()) != dim || static_cast<std::size_t>(matrix.cols()) != dim) {
        throw std::invalid_argument("dense matrix does not match the model dimension");
    }
    SparseState state(model);
    for (std::size_t r = 0; r < dim; r++) {
        for (std::size_t c = 0; c < dim; c++) {
            if (matrix(r, c) != Amplitude{}) {
                state.add(DoubledConfig{dense_config(*model, r), dense_config(*model, c)}, matrix(r, c));
            }
        }
    }
    return state;
}

double psd_defect(const DenseDensity &rho) {
    Eigen::MatrixXcd hermitian = (rho.matrix + rho.matrix.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigensolver failed");
    }
    return std::max(0.0, -solver.eigenvalues().minCoeff());
}

double hermiticity_defect(const DenseDensity &rho) {
    return (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace qdouble
