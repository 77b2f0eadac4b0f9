#pragma once

#include <stdexcept>
#include <string>

namespace nrad {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// dataset
struct MalformedRow : Error {
    explicit MalformedRow(const std::string& msg) : Error(msg) {}
};
struct EmptyFile : Error {
    explicit EmptyFile(const std::string& msg) : Error(msg) {}
};
struct TooShort : Error {
    explicit TooShort(const std::string& msg) : Error(msg) {}
};
struct NoPositives : Error {
    explicit NoPositives(const std::string& msg) : Error(msg) {}
};
struct InvalidRate : Error {
    explicit InvalidRate(const std::string& msg) : Error(msg) {}
};

// encoder / trainer
struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};
struct Divergence : Error {
    explicit Divergence(const std::string& msg) : Error(msg) {}
};

// selector
struct SpectralRadiusViolation : Error {
    explicit SpectralRadiusViolation(const std::string& msg) : Error(msg) {}
};

// criterion
struct EmptySide : Error {
    explicit EmptySide(const std::string& msg) : Error(msg) {}
};

// pointdet
struct InvalidK : Error {
    explicit InvalidK(const std::string& msg) : Error(msg) {}
};

// metrics
struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};
struct InvalidDelta : Error {
    explicit InvalidDelta(const std::string& msg) : Error(msg) {}
};

// cli / config
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// pipeline errors carry the stage that raised them
struct StageError : Error {
    std::string stage;
    StageError(const std::string& stage_name, const std::string& msg)
        : Error("[stage:" + stage_name + "] " + msg), stage(stage_name) {}
};

}  // namespace nrad
