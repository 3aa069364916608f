#include "sheetscan/scan.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sheetscan/canonical_json.hpp"
#include "sheetscan/errors.hpp"
#include "sheetscan/version.hpp"
#include "sheetscan/xlsx.hpp"

namespace sheetscan {

namespace fs = std::filesystem;
using nlohmann::json;

ScanFormat scan_format_from_name(std::string_view name) {
    if (name == "auto") return ScanFormat::auto_detect;
    if (name == "xlsx") return ScanFormat::xlsx;
    if (name == "json") return ScanFormat::json;
    throw FormatError("unknown scan format '" + std::string(name) + "'");
}

std::string_view scan_format_name(ScanFormat format) {
    switch (format) {
        case ScanFormat::auto_detect: return "auto";
        case ScanFormat::xlsx: return "xlsx";
        case ScanFormat::json: return "json";
    }
    return "?";
}

ScanConfig load_scan_config(const std::string& path, ScanConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw FormatError("config '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw FormatError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "exact_test_cap") {
            base.exact_test_cap = value.get<int>();
        } else if (key == "c4_mode") {
            base.metrics.c4_mode =
                c4_mode_from_name(value.get<std::string>());
        } else if (key == "exclude_passing") {
            base.metrics.exclude_passing = value.get<bool>();
        } else {
            throw FormatError("config: unknown key '" + key + "'");
        }
    }
    return base;
}

namespace {

bool has_extension(const fs::path& p, const char* ext) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return e == ext;
}

bool candidate_file(const fs::path& p, ScanFormat format) {
    switch (format) {
        case ScanFormat::xlsx: return has_extension(p, ".xlsx");
        case ScanFormat::json: return has_extension(p, ".json");
        case ScanFormat::auto_detect:
            return has_extension(p, ".xlsx") || has_extension(p, ".json");
    }
    return false;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw UnreadableFileError("cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct FileResult {
    bool ok = false;
    std::string line;                   // JSONL record
    std::string error;                  // failure reason
    std::vector<std::string> warnings;  // loader warnings
};

FileResult process_file(const fs::path& path, const std::string& rel,
                        const FunctionCatalog& catalog,
                        const ScanConfig& config) {
    FileResult out;
    try {
        std::string bytes = read_file(path);
        Workbook wb;
        if (has_extension(path, ".xlsx")) {
            auto [loaded, info] = load_xlsx(bytes);
            wb = std::move(loaded);
            for (auto& w : info.parse_warnings) {
                out.warnings.push_back(rel + ": " + w);
            }
        } else {
            wb = load_canonical(bytes);
        }
        wb.source_id = rel;
        MetricRecord rec = compute_record(wb, catalog, config.metrics);
        out.line = record_to_json_line(rec);
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

ScanManifest scan_corpus(const fs::path& corpus_dir, const fs::path& out_jsonl,
                         const FunctionCatalog& catalog,
                         const ScanConfig& config) {
    if (!fs::exists(corpus_dir) || !fs::is_directory(corpus_dir)) {
        throw Error("corpus directory '" + corpus_dir.string() +
                    "' does not exist");
    }

    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(corpus_dir)) {
        if (entry.is_regular_file() &&
            candidate_file(entry.path(), config.format)) {
            files.push_back(entry.path());
        }
    }
    std::vector<std::string> rel_paths(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        rel_paths[i] =
            fs::relative(files[i], corpus_dir).generic_string();
    }
    // Path-sorted processing keeps every output deterministic.
    std::vector<std::size_t> order(files.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) {
                  return rel_paths[a] < rel_paths[b];
              });

    std::vector<FileResult> results(files.size());
    unsigned jobs = config.jobs > 0
                        ? static_cast<unsigned>(config.jobs)
                        : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, std::max<std::size_t>(files.size(), 1));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t k = next.fetch_add(1);
            if (k >= order.size()) break;
            const std::size_t i = order[k];
            results[i] = process_file(files[i], rel_paths[i], catalog, config);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    ScanManifest manifest;
    manifest.corpus_name = corpus_dir.filename().generic_string();
    if (manifest.corpus_name.empty()) {
        manifest.corpus_name = corpus_dir.generic_string();
    }
    manifest.tool_version = kVersion;
    manifest.config = config;

    std::ofstream out(out_jsonl, std::ios::binary);
    if (!out) {
        throw Error("cannot write output '" + out_jsonl.string() + "'");
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        ++manifest.files_seen;
        if (results[i].ok) {
            ++manifest.files_loaded;
            out << results[i].line << "\n";
        } else {
            ++manifest.files_failed;
            manifest.failures.emplace_back(rel_paths[i], results[i].error);
        }
        for (auto& w : results[i].warnings) {
            manifest.warnings.push_back(std::move(w));
        }
    }
    out.close();

    std::ofstream mf(out_jsonl.string() + ".manifest.json",
                     std::ios::binary);
    if (mf) mf << manifest_to_json(manifest);
    return manifest;
}

std::string manifest_to_json(const ScanManifest& m) {
    json j;
    j["corpus_name"] = m.corpus_name;
    j["files_seen"] = m.files_seen;
    j["files_loaded"] = m.files_loaded;
    j["files_failed"] = m.files_failed;
    json failures = json::array();
    for (const auto& [path, reason] : m.failures) {
        failures.push_back({{"path", path}, {"reason", reason}});
    }
    j["failures"] = std::move(failures);
    j["warnings"] = m.warnings;
    j["tool_version"] = m.tool_version;
    j["config"] = {
        {"exact_test_cap", m.config.exact_test_cap},
        {"c4_mode", std::string(c4_mode_name(m.config.metrics.c4_mode))},
        {"exclude_passing", m.config.metrics.exclude_passing},
        {"format", std::string(scan_format_name(m.config.format))},
    };
    return j.dump(2) + "\n";
}

}  // namespace sheetscan
