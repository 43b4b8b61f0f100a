#pragma once

#include <stdexcept>
#include <string>

namespace texclass {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file or stream; the message names the offending field.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace texclass
