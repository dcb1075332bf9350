#include "tascl/list_decoder.hpp"

#include <stdexcept>

namespace tascl {

namespace {

struct ScState {
    const PolarCode& code;
    NodeFunction node;
    Bits& u;
    double metric = 0.0;
};

// Decodes source bits [first, first + llr.size()) and writes their
// re-encoded codeword into `codeword`.
void sc_node(ScState& st, std::span<const double> llr, int first, std::span<std::uint8_t> codeword)
{
    const std::size_t size = llr.size();
    if (size == 1) {
        std::uint8_t bit = 0;
        if (st.code.is_frozen(first)) {
            if (llr[0] < 0)
                st.metric -= llr[0];
        } else {
            bit = llr[0] >= 0 ? 0 : 1;
        }
        st.u[static_cast<std::size_t>(first)] = bit;
        codeword[0] = bit;
        return;
    }
    const std::size_t half = size / 2;
    std::vector<double> child(half);
    Bits left(half), right(half);
    for (std::size_t j = 0; j < half; ++j)
        child[j] = node_f(llr[j], llr[j + half], st.node);
    sc_node(st, child, first, left);
    for (std::size_t j = 0; j < half; ++j)
        child[j] = node_g(llr[j], llr[j + half], left[j]);
    sc_node(st, child, first + static_cast<int>(half), right);
    for (std::size_t j = 0; j < half; ++j) {
        codeword[j] = left[j] ^ right[j];
        codeword[j + half] = right[j];
    }
}

}  // namespace

DecodeOutcome sc_decode(const PolarCode& code, std::span<const double> llr, NodeFunction node)
{
    if (static_cast<int>(llr.size()) != code.length())
        throw std::invalid_argument("sc_decode: expected N channel LLRs");
    Bits u(static_cast<std::size_t>(code.length()), 0);
    Bits codeword(u.size());
    ScState st{code, node, u};
    sc_node(st, llr, 0, codeword);

    DecodeOutcome out;
    out.selected = code.info_bits(u);
    out.crc_pass = code.crc().check(out.selected);
    out.list.push_back({std::move(u), st.metric});
    return out;
}

}  // namespace tascl
