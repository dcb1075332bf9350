#include "tascl/csv.hpp"
#include "tascl/polar_code.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tascl {

namespace {

constexpr const char* kHexDigits = "0123456789abcdef";

// Digit j carries mask bits 4j..4j+3, bit 4j in the most significant place.
std::string mask_to_hex(const Bits& mask)
{
    std::vector<int> nibbles((mask.size() + 3) / 4, 0);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i])
            nibbles[i / 4] |= 8 >> (i % 4);
    std::string hex;
    for (int v : nibbles)
        hex += kHexDigits[v];
    return hex;
}

int hex_value(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    throw std::invalid_argument(std::string("invalid hex digit '") + c + "'");
}

Bits hex_to_mask(const std::string& hex, std::size_t length)
{
    if (hex.size() != (length + 3) / 4)
        throw std::invalid_argument("frozen_mask has the wrong number of hex digits");
    Bits mask(length);
    for (std::size_t i = 0; i < length; ++i)
        mask[i] = static_cast<std::uint8_t>((hex_value(hex[i / 4]) >> (3 - i % 4)) & 1);
    for (std::size_t i = length; i < hex.size() * 4; ++i)
        if ((hex_value(hex[i / 4]) >> (3 - i % 4)) & 1)
            throw std::invalid_argument("frozen_mask has bits set beyond N");
    return mask;
}

std::string to_hex(std::uint64_t v)
{
    std::ostringstream s;
    s << "0x" << std::hex << v;
    return s.str();
}

std::uint64_t parse_hex(const std::string& text)
{
    std::string_view v = text;
    if (v.starts_with("0x") || v.starts_with("0X"))
        v.remove_prefix(2);
    if (v.empty() || v.size() > 16)
        throw std::invalid_argument("bad hex value '" + text + "'");
    std::uint64_t out = 0;
    for (char c : v)
        out = (out << 4) | static_cast<std::uint64_t>(hex_value(c));
    return out;
}

}  // namespace

void write_code(std::ostream& out, const PolarCode& code)
{
    out << "# polar code description\n"
        << "N = " << code.length() << '\n'
        << "K = " << code.info_length() << '\n'
        << "r = " << code.crc_width() << '\n'
        << "design_snr_db = " << format_number(code.design_snr_db()) << '\n'
        << "crc_polynomial = " << to_hex(code.crc().polynomial()) << '\n'
        << "crc_initial = " << to_hex(code.crc().initial_register()) << '\n'
        << "frozen_mask = " << mask_to_hex(code.frozen_mask()) << '\n';
}

PolarCode read_code(std::istream& in)
{
    static const char* const kKeys[] = {"N", "K", "r", "design_snr_db", "crc_polynomial", "crc_initial",
                                        "frozen_mask"};
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("code file line " + std::to_string(line_no) + ": expected key = value");
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = strip(line.substr(0, eq));
        bool known = false;
        for (const char* k : kKeys)
            known = known || key == k;
        if (!known)
            throw std::invalid_argument("code file: unknown key '" + key + "'");
        if (!kv.emplace(key, strip(line.substr(eq + 1))).second)
            throw std::invalid_argument("code file: duplicate key '" + key + "'");
    }
    for (const char* k : kKeys)
        if (!kv.count(k))
            throw std::invalid_argument(std::string("code file: missing key '") + k + "'");

    const auto length = parse_int(kv["N"]);
    const auto info_length = parse_int(kv["K"]);
    const auto width = parse_int(kv["r"]);
    if (length < 1 || length > (std::int64_t{1} << 24))
        throw std::invalid_argument("code file: N out of range");
    CrcSpec crc(static_cast<int>(width), parse_hex(kv["crc_polynomial"]), parse_hex(kv["crc_initial"]));
    PolarCode code(hex_to_mask(kv["frozen_mask"], static_cast<std::size_t>(length)), crc,
                   parse_double(kv["design_snr_db"]));
    if (code.info_length() != info_length)
        throw std::invalid_argument("code file: K does not match the frozen mask");
    return code;
}

void save_code(const std::string& path, const PolarCode& code)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_code(out, code);
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

PolarCode load_code(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open code file '" + path + "'");
    return read_code(in);
}

}  // namespace tascl
