#include "tascl/adaptive.hpp"

#include <bit>
#include <stdexcept>

namespace tascl {

AsclDecoder::AsclDecoder(const PolarCode& code, AsclConfig cfg, NodeFunction node)
{
    if (cfg.l_max < 1 || !std::has_single_bit(static_cast<unsigned>(cfg.l_max)))
        throw std::invalid_argument("A-SCL l_max must be a power of two");
    for (int list = 1; list <= cfg.l_max; list *= 2)
        stages_.emplace_back(code, list, node);
}

AsclResult AsclDecoder::decode(std::span<const double> llr)
{
    AsclResult result;
    for (auto& stage : stages_) {
        result.attempts.push_back(stage.list_size());
        result.outcome = stage.decode(llr);
        if (result.outcome.crc_pass) {
            result.success = true;
            break;
        }
    }
    return result;
}

AsclResult ascl_decode(const PolarCode& code, std::span<const double> llr, AsclConfig cfg)
{
    return AsclDecoder(code, cfg).decode(llr);
}

}  // namespace tascl
