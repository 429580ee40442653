#pragma once

#include <stdexcept>
#include <string>

namespace fep {

struct SyntaxError : std::runtime_error {
    int line;
    int column;
    SyntaxError(int ln, int col, const std::string& msg)
        : std::runtime_error("syntax error at " + std::to_string(ln) + ":" + std::to_string(col) +
                             ": " + msg),
          line(ln), column(col) {}
};

struct TypeError : std::runtime_error {
    int line;
    int column;
    TypeError(int ln, int col, const std::string& msg)
        : std::runtime_error("type error at " + std::to_string(ln) + ":" + std::to_string(col) +
                             ": " + msg),
          line(ln), column(col) {}
};

struct MisalignedScript : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlignmentMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyPool : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoCoveringInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MixedMode : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fep
