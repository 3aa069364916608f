#pragma once

// Assembles minimal .xlsx byte buffers for loader tests.

#include <string>
#include <vector>

#include "zip_writer.hpp"

namespace sheetscan::testing {

struct XlsxSheetSpec {
    std::string name;
    std::string sheet_data_xml;  // raw <sheetData>...</sheetData> + extras
};

inline std::string build_xlsx(const std::vector<XlsxSheetSpec>& sheets,
                              const std::string& shared_strings_xml = "",
                              bool deflate = false) {
    ZipWriter zip;
    zip.add("_rels/.rels", R"(<?xml version="1.0"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">
<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="xl/workbook.xml"/>
</Relationships>)");

    std::string workbook = R"(<?xml version="1.0"?>
<workbook xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships"><sheets>)";
    std::string wb_rels = R"(<?xml version="1.0"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">)";
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        workbook += "<sheet name=\"" + sheets[i].name + "\" sheetId=\"" +
                    std::to_string(i + 1) + "\" r:id=\"rId" +
                    std::to_string(i + 1) + "\"/>";
        wb_rels +=
            "<Relationship Id=\"rId" + std::to_string(i + 1) +
            "\" Type=\"http://schemas.openxmlformats.org/officeDocument/"
            "2006/relationships/worksheet\" Target=\"worksheets/sheet" +
            std::to_string(i + 1) + ".xml\"/>";
    }
    workbook += "</sheets></workbook>";
    if (!shared_strings_xml.empty()) {
        wb_rels +=
            "<Relationship Id=\"rIdS\" "
            "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/"
            "relationships/sharedStrings\" Target=\"sharedStrings.xml\"/>";
    }
    wb_rels += "</Relationships>";

    zip.add("xl/workbook.xml", workbook, deflate);
    zip.add("xl/_rels/workbook.xml.rels", wb_rels);
    if (!shared_strings_xml.empty()) {
        zip.add("xl/sharedStrings.xml", shared_strings_xml, deflate);
    }
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        std::string sheet = R"(<?xml version="1.0"?>
<worksheet xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main">)";
        sheet += sheets[i].sheet_data_xml;
        sheet += "</worksheet>";
        zip.add("xl/worksheets/sheet" + std::to_string(i + 1) + ".xml",
                sheet, deflate);
    }
    return zip.finish();
}

}  // namespace sheetscan::testing
