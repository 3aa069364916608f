#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sheetscan/function_catalog.hpp"
#include "sheetscan/metrics.hpp"
#include "sheetscan/stats.hpp"

namespace sheetscan {

enum class ScanFormat { auto_detect, xlsx, json };

ScanFormat scan_format_from_name(std::string_view name);
std::string_view scan_format_name(ScanFormat format);

struct ScanConfig {
    MetricOptions metrics;
    int exact_test_cap = stats::kDefaultExactCap;
    ScanFormat format = ScanFormat::auto_detect;
    int jobs = 0;  // 0: hardware concurrency
};

// Loads the optional JSON config file. Documented keys: exact_test_cap
// (int), c4_mode ("pairs"|"cells"|"occurrences"), exclude_passing (bool).
// Unknown keys are a FormatError.
ScanConfig load_scan_config(const std::string& path,
                            ScanConfig base = ScanConfig{});

struct ScanManifest {
    std::string corpus_name;
    long long files_seen = 0;
    long long files_loaded = 0;
    long long files_failed = 0;
    std::vector<std::pair<std::string, std::string>> failures;  // path, why
    std::vector<std::string> warnings;
    std::string tool_version;
    ScanConfig config;
};

// Scans a corpus directory into a JSONL record file (one line per loaded
// workbook, path-sorted) and writes "<out>.manifest.json" beside it.
// Unreadable files are recorded, never fatal; an unreadable directory
// throws. Output bytes are independent of the worker count.
ScanManifest scan_corpus(const std::filesystem::path& corpus_dir,
                         const std::filesystem::path& out_jsonl,
                         const FunctionCatalog& catalog,
                         const ScanConfig& config = {});

std::string manifest_to_json(const ScanManifest& manifest);

}  // namespace sheetscan
