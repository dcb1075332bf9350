// Successive cancellation (SC) and SC list decoding with CRC-aided selection.
#pragma once

#include "tascl/polar_code.hpp"

#include <span>
#include <vector>

namespace tascl {

/// Channel LLRs, natural log, positive favours bit 0.
using LlrFrame = std::vector<double>;

/// Check-node update used on the left branch of every tree node.
enum class NodeFunction {
    MinSum,  ///< sign(a) sign(b) min(|a|, |b|)
    Exact,   ///< 2 atanh(tanh(a/2) tanh(b/2))
};

double node_f(double a, double b, NodeFunction kind);

/// Variable-node update on the right branch given the left partial sum.
inline double node_g(double a, double b, std::uint8_t s) { return s ? b - a : b + a; }

struct DecodePath {
    Bits decisions;      ///< length N source word
    double metric = 0.0; ///< accumulated penalty, lower is better
};

struct DecodeOutcome {
    Bits selected;                   ///< K information bits (message then CRC)
    bool crc_pass = false;
    std::vector<DecodePath> list;    ///< ascending metric
};

/// Reusable SCL decoder. One decode at a time per instance; separate
/// instances are independent.
///
/// Path state follows the lazy-copy layout: each path maps every tree depth
/// to an array in a per-depth pool, and arrays are shared between paths until
/// one of them writes.
class ListDecoder {
public:
    ListDecoder(const PolarCode& code, int list_size, NodeFunction node = NodeFunction::MinSum);

    DecodeOutcome decode(std::span<const double> llr);

    int list_size() const { return list_size_; }

    /// Number of surviving paths after each source bit of the last decode.
    const std::vector<int>& survivor_counts() const { return survivor_counts_; }

private:
    struct Candidate {
        double metric;
        int parent;  // slot of the forked path
        std::uint8_t bit;
        int order;
    };

    void compute_llrs(int slot, int bit);
    void propagate_bits(int slot, int bit, std::uint8_t value);

    double* llr_write(int slot, int depth);
    const double* llr_read(int slot, int depth) const;
    std::uint8_t* bits_write(int slot, int depth);
    const std::uint8_t* bits_read(int slot, int depth) const;

    int clone_path(int slot);
    void kill_path(int slot);

    const PolarCode* code_;
    int list_size_;
    NodeFunction node_;
    int n_;
    int length_;

    std::span<const double> channel_;
    // Pools: depth d arrays have N >> d entries. LLR pools cover depths 1..n,
    // bit pools depths 0..n-1.
    std::vector<std::vector<double>> llr_pool_;
    std::vector<std::vector<std::uint8_t>> bit_pool_;
    std::vector<std::vector<int>> llr_refs_;
    std::vector<std::vector<int>> bit_refs_;
    std::vector<std::vector<int>> llr_free_;
    std::vector<std::vector<int>> bit_free_;
    // slot -> array index per depth
    std::vector<std::vector<int>> path_llr_;
    std::vector<std::vector<int>> path_bits_;
    std::vector<double> metric_;
    std::vector<int> free_slots_;
    std::vector<int> active_;  // slot order defines tie-breaking
    // history_[bit][slot] = (parent slot before this bit, decided bit)
    std::vector<std::vector<std::pair<int, std::uint8_t>>> history_;
    std::vector<int> survivor_counts_;
    std::vector<Candidate> candidates_;
};

DecodeOutcome scl_decode(const PolarCode& code, std::span<const double> llr, int list_size,
                         NodeFunction node = NodeFunction::MinSum);

/// Plain recursive SC decoder, independent of the list machinery.
DecodeOutcome sc_decode(const PolarCode& code, std::span<const double> llr,
                        NodeFunction node = NodeFunction::MinSum);

}  // namespace tascl
