#pragma once

#include <stdexcept>
#include <string>

namespace pwlab {

/// Base of every error the library raises. `code()` is a stable,
/// machine-parsable name used by the CLI error line.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define PWLAB_DEFINE_ERROR(Name)                                      \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    };

PWLAB_DEFINE_ERROR(ParseError)
PWLAB_DEFINE_ERROR(SchemaError)
PWLAB_DEFINE_ERROR(ConfigError)
PWLAB_DEFINE_ERROR(NotFound)
PWLAB_DEFINE_ERROR(FetchError)
PWLAB_DEFINE_ERROR(BindError)
PWLAB_DEFINE_ERROR(EmptyCrawl)
PWLAB_DEFINE_ERROR(DegenerateData)
PWLAB_DEFINE_ERROR(TooFewSamples)
PWLAB_DEFINE_ERROR(RegistryMismatch)
PWLAB_DEFINE_ERROR(VersionMismatch)
PWLAB_DEFINE_ERROR(EmptyArchive)
PWLAB_DEFINE_ERROR(InputError)

#undef PWLAB_DEFINE_ERROR

}  // namespace pwlab
