#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "sheetscan/errors.hpp"
#include "sheetscan/report.hpp"
#include "sheetscan/scan.hpp"
#include "sheetscan/version.hpp"

namespace {

#ifndef SHEETSCAN_DEFAULT_CATALOG
#define SHEETSCAN_DEFAULT_CATALOG ""
#endif

std::string default_catalog_path() {
    if (const char* env = std::getenv("SHEETSCAN_CATALOG")) return env;
    return SHEETSCAN_DEFAULT_CATALOG;
}

sheetscan::FunctionCatalog load_catalog_or_die(const std::string& path) {
    if (path.empty()) {
        std::cerr << "sheetscan: no function catalog; pass --catalog or set "
                     "SHEETSCAN_CATALOG\n";
        std::exit(1);
    }
    return sheetscan::FunctionCatalog::load_csv_file(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spreadsheet corpus metrics scanner"};
    app.set_version_flag("--version", sheetscan::kVersion);
    app.require_subcommand(1);

    std::string catalog_path = default_catalog_path();
    app.add_option("--catalog", catalog_path,
                   "Function catalog CSV (name,category)");
    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON config: exact_test_cap, c4_mode, exclude_passing");

    // scan
    auto* scan = app.add_subcommand("scan", "Scan a corpus directory");
    std::string scan_dir;
    std::string scan_out;
    std::string scan_format = "auto";
    int scan_jobs = 0;
    scan->add_option("dir", scan_dir, "Corpus directory")->required();
    scan->add_option("--out", scan_out, "Output JSONL path")->required();
    scan->add_option("--format", scan_format, "xlsx|json|auto")
        ->check(CLI::IsMember({"xlsx", "json", "auto"}));
    scan->add_option("--jobs", scan_jobs, "Worker threads (0 = auto)");

    // summarize
    auto* summarize = app.add_subcommand("summarize",
                                         "Summarize a record file");
    std::string sum_records;
    bool sum_json = false;
    summarize->add_option("records", sum_records, "JSONL record file")
        ->required();
    summarize->add_flag("--json", sum_json, "Machine-readable output");

    // compare
    auto* compare = app.add_subcommand("compare", "Compare two corpora");
    std::string cmp_a;
    std::string cmp_b;
    bool cmp_json = false;
    compare->add_option("a", cmp_a, "First JSONL record file")->required();
    compare->add_option("b", cmp_b, "Second JSONL record file")->required();
    compare->add_flag("--json", cmp_json, "Machine-readable output");

    // functions
    auto* functions = app.add_subcommand("functions",
                                         "Top-n function usage table");
    std::string fun_records;
    int fun_top = 15;
    bool fun_json = false;
    functions->add_option("records", fun_records, "JSONL record file")
        ->required();
    functions->add_option("--top", fun_top, "Number of functions to rank");
    functions->add_flag("--json", fun_json, "Machine-readable output");

    CLI11_PARSE(app, argc, argv);

    try {
        sheetscan::ScanConfig config;
        if (!config_path.empty()) {
            config = sheetscan::load_scan_config(config_path, config);
        }

        if (scan->parsed()) {
            auto catalog = load_catalog_or_die(catalog_path);
            config.format = sheetscan::scan_format_from_name(scan_format);
            config.jobs = scan_jobs;
            auto manifest =
                sheetscan::scan_corpus(scan_dir, scan_out, catalog, config);
            std::cerr << "scanned " << manifest.files_seen << " files: "
                      << manifest.files_loaded << " loaded, "
                      << manifest.files_failed << " failed\n";
            for (const auto& [path, reason] : manifest.failures) {
                std::cerr << "  failed " << path << ": " << reason << "\n";
            }
            return manifest.files_failed > 0 ? 2 : 0;
        }
        if (summarize->parsed()) {
            auto catalog = load_catalog_or_die(catalog_path);
            auto records = sheetscan::read_records_file(sum_records);
            auto summary = sheetscan::summarize_records(
                records, catalog,
                std::filesystem::path(sum_records).stem().string());
            std::cout << (sum_json
                              ? sheetscan::render_summary_json(summary)
                              : sheetscan::render_summary_text(summary));
            return 0;
        }
        if (compare->parsed()) {
            auto records_a = sheetscan::read_records_file(cmp_a);
            auto records_b = sheetscan::read_records_file(cmp_b);
            auto report = sheetscan::compare_records(
                records_a, records_b, config.exact_test_cap,
                std::filesystem::path(cmp_a).stem().string(),
                std::filesystem::path(cmp_b).stem().string());
            std::cout << (cmp_json
                              ? sheetscan::render_comparison_json(report)
                              : sheetscan::render_comparison_text(report));
            return 0;
        }
        if (functions->parsed()) {
            auto catalog = load_catalog_or_die(catalog_path);
            auto records = sheetscan::read_records_file(fun_records);
            if (records.empty()) {
                std::cerr << "sheetscan: no records in " << fun_records
                          << "\n";
                return 1;
            }
            std::cout << (fun_json
                              ? sheetscan::render_functions_json(
                                    records, catalog, fun_top)
                              : sheetscan::render_functions_text(
                                    records, catalog, fun_top));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "sheetscan: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
