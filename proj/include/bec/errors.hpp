#pragma once

#include <stdexcept>
#include <string>

namespace bec {

// Base of everything the library throws on purpose. The CLI maps the
// concrete subclasses onto exit codes (config 2, numerical 3, I/O 4).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

// Prefixes the message of a bec::Error with a stage label, keeping its type.
template <typename Fn>
decltype(auto) with_stage(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(stage + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(stage + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(stage + ": " + e.what());
  }
}

}  // namespace bec
