#pragma once

#include "gaussdaemon/error.hpp"
#include "gaussdaemon/linalg.hpp"

#include <doctest.h>

#define CHECK_ERROR_KIND(expr, expected)                              \
  do {                                                                \
    bool thrown_ = false;                                             \
    try {                                                             \
      static_cast<void>(expr);                                        \
    } catch (const gaussdaemon::Error& e_) {                          \
      thrown_ = true;                                                 \
      CHECK_MESSAGE(e_.kind() == (expected), e_.what());              \
    }                                                                 \
    CHECK_MESSAGE(thrown_, "expected an error from " #expr);          \
  } while (false)

inline double max_diff(const gaussdaemon::Matrix& a, const gaussdaemon::Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}
