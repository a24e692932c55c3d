#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "bhv/expr.hpp"

namespace Catch {
template <>
struct StringMaker<bhv::Expr> {
  static std::string convert(const bhv::Expr& e) { return "\n" + e.str(); }
};
template <>
struct StringMaker<bhv::ParamScalar> {
  static std::string convert(const bhv::ParamScalar& p) { return p.str(); }
};
}  // namespace Catch
