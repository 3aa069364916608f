#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sheetscan {

// Base class for everything this library throws on bad input.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally broken input: malformed JSON, bad address syntax,
// unknown keys where the schema forbids them.
struct FormatError : Error {
    using Error::Error;
};

// Input that parses but violates a model invariant: duplicate cell
// addresses, overlapping merged regions, duplicate sheet names.
struct IntegrityError : Error {
    using Error::Error;
};

// A corpus file that cannot be opened as a workbook at all (not a ZIP,
// missing workbook part). Scanning skips and logs these.
struct UnreadableFileError : Error {
    using Error::Error;
};

// A metric-record line that is missing required fields or has the
// wrong types.
struct SchemaError : Error {
    using Error::Error;
};

// Formula text that does not lex or parse. `position` is the 0-based
// character offset where the failure was detected.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t position)
        : Error(std::move(message)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace sheetscan
