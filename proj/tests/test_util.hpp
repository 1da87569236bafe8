#pragma once

#include <doctest.h>

#include "hbid/error.hpp"

template <typename F>
hbid::ErrorCode thrown_code(F&& f) {
  try {
    f();
  } catch (const hbid::Error& e) {
    return e.code();
  }
  FAIL("expected hbid::Error");
  return hbid::ErrorCode::InvalidArgument;
}

#define CHECK_CODE(expr, code) CHECK(thrown_code([&] { (void)(expr); }) == (code))
