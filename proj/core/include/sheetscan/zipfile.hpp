#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sheetscan {

// Read-only view over a ZIP archive held in memory. Supports stored and
// deflated entries, which is all .xlsx writers produce. Throws
// FormatError when the bytes are not a usable archive.
class ZipArchive {
public:
    static ZipArchive from_bytes(std::string_view bytes);

    bool contains(const std::string& name) const;
    // Decompressed entry content; nullopt when absent.
    std::optional<std::string> read(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    struct Entry {
        std::size_t local_offset = 0;
        std::size_t compressed_size = 0;
        std::size_t uncompressed_size = 0;
        int method = 0;
    };

    std::string_view bytes_;
    std::map<std::string, Entry> entries_;
};

}  // namespace sheetscan
