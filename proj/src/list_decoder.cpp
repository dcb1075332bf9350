#include "tascl/list_decoder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace tascl {

double node_f(double a, double b, NodeFunction kind)
{
    const double sign = (a < 0) != (b < 0) ? -1.0 : 1.0;
    const double min_sum = sign * std::min(std::abs(a), std::abs(b));
    if (kind == NodeFunction::MinSum)
        return min_sum;
    // Jacobian form of 2 atanh(tanh(a/2) tanh(b/2)), stable for large |a|, |b|.
    return min_sum + std::log1p(std::exp(-std::abs(a + b))) - std::log1p(std::exp(-std::abs(a - b)));
}

ListDecoder::ListDecoder(const PolarCode& code, int list_size, NodeFunction node)
    : code_(&code), list_size_(list_size), node_(node), n_(code.n()), length_(code.length())
{
    if (list_size < 1)
        throw std::invalid_argument("list size must be at least 1");
    const auto L = static_cast<std::size_t>(list_size);
    const auto depths = static_cast<std::size_t>(n_ + 1);
    llr_pool_.resize(depths);
    bit_pool_.resize(depths);
    llr_refs_.assign(depths, std::vector<int>(L, 0));
    bit_refs_.assign(depths, std::vector<int>(L, 0));
    llr_free_.resize(depths);
    bit_free_.resize(depths);
    for (int d = 0; d <= n_; ++d) {
        const auto size = static_cast<std::size_t>(length_ >> d);
        if (d >= 1)
            llr_pool_[static_cast<std::size_t>(d)].assign(L * size, 0.0);
        if (d < n_)
            bit_pool_[static_cast<std::size_t>(d)].assign(L * size, 0);
    }
    path_llr_.assign(L, std::vector<int>(depths, -1));
    path_bits_.assign(L, std::vector<int>(depths, -1));
    metric_.assign(L, 0.0);
    history_.assign(static_cast<std::size_t>(length_), std::vector<std::pair<int, std::uint8_t>>(L));
    candidates_.reserve(2 * L);
}

double* ListDecoder::llr_write(int slot, int depth)
{
    const auto d = static_cast<std::size_t>(depth);
    int& idx = path_llr_[static_cast<std::size_t>(slot)][d];
    if (idx < 0 || llr_refs_[d][static_cast<std::size_t>(idx)] > 1) {
        if (idx >= 0)
            --llr_refs_[d][static_cast<std::size_t>(idx)];
        idx = llr_free_[d].back();
        llr_free_[d].pop_back();
        llr_refs_[d][static_cast<std::size_t>(idx)] = 1;
    }
    return llr_pool_[d].data() + static_cast<std::size_t>(idx) * static_cast<std::size_t>(length_ >> depth);
}

const double* ListDecoder::llr_read(int slot, int depth) const
{
    if (depth == 0)
        return channel_.data();
    const auto d = static_cast<std::size_t>(depth);
    const int idx = path_llr_[static_cast<std::size_t>(slot)][d];
    return llr_pool_[d].data() + static_cast<std::size_t>(idx) * static_cast<std::size_t>(length_ >> depth);
}

std::uint8_t* ListDecoder::bits_write(int slot, int depth)
{
    const auto d = static_cast<std::size_t>(depth);
    const auto size = static_cast<std::size_t>(length_ >> depth);
    int& idx = path_bits_[static_cast<std::size_t>(slot)][d];
    if (idx < 0 || bit_refs_[d][static_cast<std::size_t>(idx)] > 1) {
        const int old = idx;
        idx = bit_free_[d].back();
        bit_free_[d].pop_back();
        bit_refs_[d][static_cast<std::size_t>(idx)] = 1;
        if (old >= 0) {
            --bit_refs_[d][static_cast<std::size_t>(old)];
            auto* pool = bit_pool_[d].data();
            std::copy_n(pool + static_cast<std::size_t>(old) * size, size, pool + static_cast<std::size_t>(idx) * size);
        }
    }
    return bit_pool_[d].data() + static_cast<std::size_t>(idx) * size;
}

const std::uint8_t* ListDecoder::bits_read(int slot, int depth) const
{
    const auto d = static_cast<std::size_t>(depth);
    const int idx = path_bits_[static_cast<std::size_t>(slot)][d];
    return bit_pool_[d].data() + static_cast<std::size_t>(idx) * static_cast<std::size_t>(length_ >> depth);
}

int ListDecoder::clone_path(int slot)
{
    const int fresh = free_slots_.back();
    free_slots_.pop_back();
    const auto s = static_cast<std::size_t>(slot);
    const auto f = static_cast<std::size_t>(fresh);
    path_llr_[f] = path_llr_[s];
    path_bits_[f] = path_bits_[s];
    for (std::size_t d = 0; d < path_llr_[f].size(); ++d) {
        if (path_llr_[f][d] >= 0)
            ++llr_refs_[d][static_cast<std::size_t>(path_llr_[f][d])];
        if (path_bits_[f][d] >= 0)
            ++bit_refs_[d][static_cast<std::size_t>(path_bits_[f][d])];
    }
    metric_[f] = metric_[s];
    return fresh;
}

void ListDecoder::kill_path(int slot)
{
    const auto s = static_cast<std::size_t>(slot);
    for (std::size_t d = 0; d < path_llr_[s].size(); ++d) {
        if (int& idx = path_llr_[s][d]; idx >= 0) {
            if (--llr_refs_[d][static_cast<std::size_t>(idx)] == 0)
                llr_free_[d].push_back(idx);
            idx = -1;
        }
        if (int& idx = path_bits_[s][d]; idx >= 0) {
            if (--bit_refs_[d][static_cast<std::size_t>(idx)] == 0)
                bit_free_[d].push_back(idx);
            idx = -1;
        }
    }
    free_slots_.push_back(slot);
}

void ListDecoder::compute_llrs(int slot, int bit)
{
    int depth = 1;
    if (bit > 0) {
        depth = n_ - std::countr_zero(static_cast<unsigned>(bit));
        // Right child at this depth: combine with the left sibling's codeword.
        const int half = length_ >> depth;
        const double* in = llr_read(slot, depth - 1);
        const std::uint8_t* left = bits_read(slot, depth - 1);
        double* out = llr_write(slot, depth);
        for (int j = 0; j < half; ++j)
            out[j] = node_g(in[j], in[j + half], left[j]);
        ++depth;
    }
    for (; depth <= n_; ++depth) {
        const int half = length_ >> depth;
        const double* in = llr_read(slot, depth - 1);
        double* out = llr_write(slot, depth);
        for (int j = 0; j < half; ++j)
            out[j] = node_f(in[j], in[j + half], node_);
    }
}

void ListDecoder::propagate_bits(int slot, int bit, std::uint8_t value)
{
    const std::uint8_t* child = &value;
    for (int depth = n_ - 1; depth >= 0; --depth) {
        const int half = length_ >> (depth + 1);
        std::uint8_t* node = bits_write(slot, depth);
        if (((bit >> (n_ - depth - 1)) & 1) == 0) {
            std::copy_n(child, half, node);
            return;
        }
        for (int j = 0; j < half; ++j) {
            node[j] ^= child[j];
            node[j + half] = child[j];
        }
        child = node;
    }
}

DecodeOutcome ListDecoder::decode(std::span<const double> llr)
{
    if (static_cast<int>(llr.size()) != length_)
        throw std::invalid_argument("decode: expected N channel LLRs");
    channel_ = llr;

    const int L = list_size_;
    for (int d = 0; d <= n_; ++d) {
        auto& lf = llr_free_[static_cast<std::size_t>(d)];
        auto& bf = bit_free_[static_cast<std::size_t>(d)];
        lf.clear();
        bf.clear();
        for (int i = L - 1; i >= 0; --i) {
            lf.push_back(i);
            bf.push_back(i);
        }
        std::fill(llr_refs_[static_cast<std::size_t>(d)].begin(), llr_refs_[static_cast<std::size_t>(d)].end(), 0);
        std::fill(bit_refs_[static_cast<std::size_t>(d)].begin(), bit_refs_[static_cast<std::size_t>(d)].end(), 0);
    }
    free_slots_.clear();
    for (int i = L - 1; i >= 1; --i)
        free_slots_.push_back(i);
    for (auto& p : path_llr_)
        std::fill(p.begin(), p.end(), -1);
    for (auto& p : path_bits_)
        std::fill(p.begin(), p.end(), -1);
    active_.assign(1, 0);
    metric_[0] = 0.0;
    survivor_counts_.clear();

    std::vector<int> next_active;
    next_active.reserve(static_cast<std::size_t>(L));
    std::vector<std::uint8_t> decided(static_cast<std::size_t>(L));
    std::vector<std::uint8_t> used(static_cast<std::size_t>(L));
    std::vector<std::uint8_t> survives(static_cast<std::size_t>(L));

    for (int bit = 0; bit < length_; ++bit) {
        auto& hist = history_[static_cast<std::size_t>(bit)];
        if (code_->is_frozen(bit)) {
            for (int slot : active_) {
                compute_llrs(slot, bit);
                const double leaf = llr_read(slot, n_)[0];
                if (leaf < 0)
                    metric_[static_cast<std::size_t>(slot)] -= leaf;
                hist[static_cast<std::size_t>(slot)] = {slot, 0};
                propagate_bits(slot, bit, 0);
            }
            survivor_counts_.push_back(static_cast<int>(active_.size()));
            continue;
        }

        candidates_.clear();
        for (int slot : active_) {
            compute_llrs(slot, bit);
            const double leaf = llr_read(slot, n_)[0];
            const double m = metric_[static_cast<std::size_t>(slot)];
            const int order = static_cast<int>(candidates_.size());
            candidates_.push_back({leaf < 0 ? m - leaf : m, slot, 0, order});
            candidates_.push_back({leaf > 0 ? m + leaf : m, slot, 1, order + 1});
        }
        // Ties keep insertion order: path order, then bit 0 before bit 1.
        std::sort(candidates_.begin(), candidates_.end(), [](const Candidate& a, const Candidate& b) {
            return a.metric < b.metric || (a.metric == b.metric && a.order < b.order);
        });
        const std::size_t keep = std::min(candidates_.size(), static_cast<std::size_t>(L));

        std::fill(used.begin(), used.end(), 0);
        std::fill(survives.begin(), survives.end(), 0);
        for (std::size_t c = 0; c < keep; ++c)
            survives[static_cast<std::size_t>(candidates_[c].parent)] = 1;
        for (int slot : active_)
            if (!survives[static_cast<std::size_t>(slot)])
                kill_path(slot);

        next_active.clear();
        for (std::size_t c = 0; c < keep; ++c) {
            const Candidate& cand = candidates_[c];
            int slot = cand.parent;
            if (used[static_cast<std::size_t>(slot)])
                slot = clone_path(cand.parent);
            else
                used[static_cast<std::size_t>(slot)] = 1;
            metric_[static_cast<std::size_t>(slot)] = cand.metric;
            decided[static_cast<std::size_t>(slot)] = cand.bit;
            hist[static_cast<std::size_t>(slot)] = {cand.parent, cand.bit};
            next_active.push_back(slot);
        }
        for (int slot : next_active)
            propagate_bits(slot, bit, decided[static_cast<std::size_t>(slot)]);
        active_.swap(next_active);
        survivor_counts_.push_back(static_cast<int>(active_.size()));
    }

    std::stable_sort(active_.begin(), active_.end(), [&](int a, int b) {
        return metric_[static_cast<std::size_t>(a)] < metric_[static_cast<std::size_t>(b)];
    });

    DecodeOutcome out;
    out.list.reserve(active_.size());
    for (int slot : active_) {
        DecodePath path;
        path.metric = metric_[static_cast<std::size_t>(slot)];
        path.decisions.assign(static_cast<std::size_t>(length_), 0);
        int s = slot;
        for (int bit = length_ - 1; bit >= 0; --bit) {
            const auto [parent, value] = history_[static_cast<std::size_t>(bit)][static_cast<std::size_t>(s)];
            path.decisions[static_cast<std::size_t>(bit)] = value;
            s = parent;
        }
        out.list.push_back(std::move(path));
    }
    for (const auto& path : out.list) {
        Bits info = code_->info_bits(path.decisions);
        if (code_->crc().check(info)) {
            out.selected = std::move(info);
            out.crc_pass = true;
            break;
        }
    }
    if (!out.crc_pass)
        out.selected = code_->info_bits(out.list.front().decisions);
    return out;
}

DecodeOutcome scl_decode(const PolarCode& code, std::span<const double> llr, int list_size, NodeFunction node)
{
    return ListDecoder(code, list_size, node).decode(llr);
}

}  // namespace tascl
