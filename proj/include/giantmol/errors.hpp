#pragma once

#include <stdexcept>
#include <string>

namespace giantmol {

// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
public:
    InvalidParams(std::string flag, const std::string& what)
        : Error(flag + ": " + what), flag_(std::move(flag)) {}
    const std::string& flag() const noexcept { return flag_; }

private:
    std::string flag_;
};

class IncompatibleVariant : public Error { public: using Error::Error; };
class SingularSystem : public Error { public: using Error::Error; };
class BadGrid : public Error { public: using Error::Error; };
class NotApplicable : public Error { public: using Error::Error; };
class DeltaTooLarge : public Error { public: using Error::Error; };
class EmptyRange : public Error { public: using Error::Error; };
class TooFewPoints : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

}  // namespace giantmol
