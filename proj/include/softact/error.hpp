#pragma once

#include <stdexcept>
#include <string>

namespace softact {

// Root of every error thrown by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
  using Error::Error;
};

// Pressure above the configured safety cap of an actuator or rig.
class SafetyCapExceeded : public Error {
public:
  using Error::Error;
};

// Pressure above an actuator's rated max_pressure.
class OverPressure : public Error {
public:
  using Error::Error;
};

class ZeroPressure : public Error {
public:
  using Error::Error;
};

class UnknownShape : public Error {
public:
  using Error::Error;
};

class InsufficientData : public Error {
public:
  using Error::Error;
};

class DegenerateData : public Error {
public:
  using Error::Error;
};

// Malformed config, CSV, or an invariant violation while building a config value.
class ConfigError : public Error {
public:
  using Error::Error;
};

class ScheduleError : public Error {
public:
  using Error::Error;
};

} // namespace softact
