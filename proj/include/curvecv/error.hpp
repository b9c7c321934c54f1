#ifndef CURVECV_ERROR_HPP
#define CURVECV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace curvecv {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input bytes: bad TSV line, bad JSON, bad CSV.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

// Well-formed input that violates a contract: unknown label, schema
// mismatch, out-of-range fold index, empty training set.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

} // namespace curvecv

#endif
