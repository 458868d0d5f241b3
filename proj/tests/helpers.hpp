#pragma once

#include <doctest.h>

#include <vector>

#include "refl/core.hpp"
#include "refl/linalg.hpp"

// Runs `expr` and checks that it throws refl::Error carrying `expected`.
#define CHECK_ERROR_CODE(expr, expected)                        \
  do {                                                          \
    bool thrown_ = false;                                       \
    try {                                                       \
      (void)(expr);                                             \
    } catch (const refl::Error& e_) {                           \
      thrown_ = true;                                           \
      CHECK(e_.code() == (expected));                           \
    }                                                           \
    CHECK_MESSAGE(thrown_, "expected refl::Error from " #expr); \
  } while (0)

inline double spectrum_distance(const std::vector<refl::Complex>& actual, std::vector<refl::Complex> expected) {
  return refl::multiset_distance(actual, expected);
}
