#include "sheetscan/zipfile.hpp"

#include <zlib.h>

#include <cstring>
#include <vector>

#include "sheetscan/errors.hpp"

namespace sheetscan {

namespace {

constexpr std::uint32_t kEocdSig = 0x06054b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kLocalSig = 0x04034b50;

std::uint16_t read_u16(std::string_view b, std::size_t off) {
    return static_cast<std::uint16_t>(
        static_cast<unsigned char>(b[off]) |
        (static_cast<unsigned char>(b[off + 1]) << 8));
}

std::uint32_t read_u32(std::string_view b, std::size_t off) {
    return static_cast<std::uint32_t>(
        static_cast<unsigned char>(b[off]) |
        (static_cast<unsigned char>(b[off + 1]) << 8) |
        (static_cast<unsigned char>(b[off + 2]) << 16) |
        (static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 3]))
         << 24));
}

std::string inflate_raw(std::string_view src, std::size_t expected_size) {
    // Deflate expands at most ~1032x; anything beyond that is a forged
    // size field.
    if (expected_size > (src.size() + 64) * 1032 ||
        expected_size > (1u << 30)) {
        throw FormatError("zip: implausible uncompressed size");
    }
    std::vector<char> out(expected_size);
    z_stream zs;
    std::memset(&zs, 0, sizeof(zs));
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
        throw FormatError("zip: inflate initialization failed");
    }
    zs.next_in =
        reinterpret_cast<Bytef*>(const_cast<char*>(src.data()));
    zs.avail_in = static_cast<uInt>(src.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END) {
        throw FormatError("zip: corrupt deflate stream");
    }
    std::size_t produced = expected_size - zs.avail_out;
    if (produced > expected_size) produced = expected_size;
    return std::string(out.data(), produced);
}

}  // namespace

ZipArchive ZipArchive::from_bytes(std::string_view bytes) {
    ZipArchive ar;
    ar.bytes_ = bytes;
    if (bytes.size() < 22) throw FormatError("zip: too small");

    // End-of-central-directory record sits within the trailing comment
    // window.
    const std::size_t scan_start =
        bytes.size() > 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
    std::size_t eocd = std::string_view::npos;
    for (std::size_t i = bytes.size() - 22 + 1; i-- > scan_start;) {
        if (read_u32(bytes, i) == kEocdSig) {
            eocd = i;
            break;
        }
    }
    if (eocd == std::string_view::npos) {
        throw FormatError("zip: end-of-central-directory not found");
    }

    const std::uint16_t entry_count = read_u16(bytes, eocd + 10);
    const std::uint32_t cd_offset = read_u32(bytes, eocd + 16);
    if (cd_offset == 0xffffffffu) {
        throw FormatError("zip: zip64 archives are not supported");
    }

    std::size_t pos = cd_offset;
    for (std::uint16_t i = 0; i < entry_count; ++i) {
        if (pos + 46 > bytes.size() || read_u32(bytes, pos) != kCentralSig) {
            throw FormatError("zip: corrupt central directory");
        }
        const std::uint16_t flags = read_u16(bytes, pos + 8);
        const std::uint16_t method = read_u16(bytes, pos + 10);
        const std::uint32_t csize = read_u32(bytes, pos + 20);
        const std::uint32_t usize = read_u32(bytes, pos + 24);
        const std::uint16_t name_len = read_u16(bytes, pos + 28);
        const std::uint16_t extra_len = read_u16(bytes, pos + 30);
        const std::uint16_t comment_len = read_u16(bytes, pos + 32);
        const std::uint32_t local_offset = read_u32(bytes, pos + 42);
        if (pos + 46 + name_len > bytes.size()) {
            throw FormatError("zip: corrupt central directory entry");
        }
        if (flags & 0x1) {
            throw FormatError("zip: encrypted entries are not supported");
        }
        std::string name(bytes.substr(pos + 46, name_len));
        ar.entries_[name] =
            Entry{local_offset, csize, usize, method};
        pos += 46 + name_len + extra_len + comment_len;
    }
    return ar;
}

bool ZipArchive::contains(const std::string& name) const {
    return entries_.count(name) > 0;
}

std::vector<std::string> ZipArchive::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, entry] : entries_) out.push_back(name);
    return out;
}

std::optional<std::string> ZipArchive::read(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) return std::nullopt;
    const Entry& e = it->second;
    if (e.local_offset + 30 > bytes_.size() ||
        read_u32(bytes_, e.local_offset) != kLocalSig) {
        throw FormatError("zip: corrupt local header for '" + name + "'");
    }
    const std::uint16_t name_len = read_u16(bytes_, e.local_offset + 26);
    const std::uint16_t extra_len = read_u16(bytes_, e.local_offset + 28);
    const std::size_t data_off = e.local_offset + 30 + name_len + extra_len;
    if (data_off + e.compressed_size > bytes_.size()) {
        throw FormatError("zip: entry data out of bounds for '" + name +
                          "'");
    }
    std::string_view data = bytes_.substr(data_off, e.compressed_size);
    if (e.method == 0) {
        if (e.compressed_size != e.uncompressed_size) {
            throw FormatError("zip: stored entry size mismatch");
        }
        return std::string(data);
    }
    if (e.method == 8) {
        return inflate_raw(data, e.uncompressed_size);
    }
    throw FormatError("zip: unsupported compression method " +
                      std::to_string(e.method));
}

}  // namespace sheetscan
