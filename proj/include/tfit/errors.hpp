#pragma once

#include <stdexcept>
#include <string>

namespace tfit {

// Error categories map onto CLI exit codes: config=2, io=3, data=4.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid options, parameters, or settings detected before real work starts.
class config_error : public error {
public:
    using error::error;
};

// Filesystem and container-format failures.
class io_error : public error {
public:
    using error::error;
};

// Input data that cannot be processed (bad corpora, degenerate builds, ...).
class data_error : public error {
public:
    using error::error;
};

enum class load_error_kind {
    bad_magic,
    version_mismatch,
    checksum_mismatch,
    truncated,
};

// Store files fail to load for distinct, testable reasons.
class load_error : public io_error {
public:
    load_error(load_error_kind kind, const std::string& msg) : io_error(msg), kind_(kind) {}
    load_error_kind kind() const noexcept { return kind_; }

private:
    load_error_kind kind_;
};

}  // namespace tfit
