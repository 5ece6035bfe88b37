#include "wmr/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "wmr/error.hpp"

namespace wmr {

namespace {

void put_u16_le(std::ostream& os, std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>(v >> 8)};
    os.write(reinterpret_cast<const char*>(b), 2);
}

void put_u32_le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64_le(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

bool get_u16_le(std::istream& is, std::uint16_t& v) {
    unsigned char b[2];
    if (!is.read(reinterpret_cast<char*>(b), 2)) return false;
    v = static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    return true;
}

bool get_u32_le(std::istream& is, std::uint32_t& v) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return true;
}

bool get_f64_le(std::istream& is, double& v) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    std::memcpy(&v, &bits, 8);
    return true;
}

}  // namespace

void save_checkpoint(const std::string& path, const NamedTensors& tensors) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open checkpoint for writing: " + path);
    os.write("WMR1", 4);
    put_u16_le(os, kCheckpointVersion);
    for (const auto& [name, tensor] : tensors) {
        put_u32_le(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32_le(os, static_cast<std::uint32_t>(tensor.rank()));
        for (int a = 0; a < tensor.rank(); ++a) {
            put_u32_le(os, static_cast<std::uint32_t>(tensor.extent(a)));
        }
        for (std::size_t i = 0; i < tensor.size(); ++i) put_f64_le(os, tensor[i]);
    }
    if (!os) throw InputError("write failed for checkpoint: " + path);
}

NamedTensors load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open checkpoint: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "WMR1", 4) != 0) {
        throw ParseError("bad checkpoint magic in " + path, 0);
    }
    std::uint16_t version = 0;
    if (!get_u16_le(is, version) || version != kCheckpointVersion) {
        throw ParseError("unsupported checkpoint version in " + path, 0);
    }
    NamedTensors out;
    while (true) {
        std::uint32_t name_len = 0;
        if (!get_u32_le(is, name_len)) break;  // clean end of file
        std::string name(name_len, '\0');
        if (!is.read(name.data(), name_len)) {
            throw ParseError("truncated tensor name in " + path, 0);
        }
        std::uint32_t rank = 0;
        if (!get_u32_le(is, rank) || rank > 8) {
            throw ParseError("bad tensor rank for '" + name + "' in " + path, 0);
        }
        std::vector<int> shape(rank);
        for (std::uint32_t a = 0; a < rank; ++a) {
            std::uint32_t e = 0;
            if (!get_u32_le(is, e) || e == 0) {
                throw ParseError("bad extent for '" + name + "' in " + path, 0);
            }
            shape[a] = static_cast<int>(e);
        }
        Tensor t(shape);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!get_f64_le(is, t[i])) {
                throw ParseError("truncated values for '" + name + "' in " + path, 0);
            }
        }
        out.emplace_back(std::move(name), std::move(t));
    }
    return out;
}

}  // namespace wmr
