#ifndef JIVE_ERRORS_HPP
#define JIVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace jive {

// Error classes map onto CLI exit codes: validation problems (bad input
// data, bad ranks) exit 2, numerical failures exit 3, I/O failures exit 4.

class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

class RankBoundsError : public InputError {
public:
    explicit RankBoundsError(const std::string& msg) : InputError(msg) {}
};

class DegenerateError : public InputError {
public:
    explicit DegenerateError(const std::string& msg) : InputError(msg) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace jive

#endif
