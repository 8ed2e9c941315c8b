#pragma once

#include <stdexcept>
#include <string>

namespace hp2ifs {

/// Precondition violated by the caller (odd block size, bad dimensions, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two code vectors produced under different encoder settings or lengths.
class IncomparableCodes : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Query against a gallery with no entries.
class EmptyModel : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file contents (bad magic, truncated record, unparsable CSV row).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hp2ifs
