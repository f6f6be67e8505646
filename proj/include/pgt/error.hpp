// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace pgt {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument is outside the documented domain of an operation.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Rejection sampling ran out of attempts; the parameters are (likely) infeasible.
class SamplingExhausted : public Error {
public:
    using Error::Error;
};

/// A configuration has no unique answer (ties, margins not met).
class AmbiguityError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration (flags, config file, template registry).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An API was called with arguments that violate its contract.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Input data (manifest, sidecar) does not follow its schema.
class MalformedRecord : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class MissingFile : public IoError {
public:
    using IoError::IoError;
};

class UnsupportedFormat : public IoError {
public:
    using IoError::IoError;
};

class DecodeError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace pgt
