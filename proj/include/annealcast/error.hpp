#pragma once

#include <stdexcept>
#include <string>

namespace annealcast {

// Error families map onto CLI exit codes: config 2, data/schema/transport 3,
// divergence 4.
enum class ErrorKind { config, data, schema, transport, divergence };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg)
        : std::runtime_error(std::move(msg)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (kind_) {
        case ErrorKind::config: return 2;
        case ErrorKind::divergence: return 4;
        default: return 3;
        }
    }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(std::string msg) : Error(ErrorKind::config, std::move(msg)) {}
};

struct DataError : Error {
    explicit DataError(std::string msg) : Error(ErrorKind::data, std::move(msg)) {}
};

struct SchemaError : Error {
    explicit SchemaError(std::string msg) : Error(ErrorKind::schema, std::move(msg)) {}
};

struct DivergenceError : Error {
    explicit DivergenceError(std::string msg) : Error(ErrorKind::divergence, std::move(msg)) {}
};

class TransportError : public Error {
public:
    TransportError(int status, std::string msg)
        : Error(ErrorKind::transport, std::move(msg)), status_(status) {}

    // HTTP status when one was received, 0 for connection-level failures.
    int status() const noexcept { return status_; }

private:
    int status_;
};

} // namespace annealcast
