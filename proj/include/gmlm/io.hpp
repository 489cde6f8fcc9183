#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "gmlm/errors.hpp"

namespace gmlm {

// Shortest round-trip decimal form. Emitted files are reproduced byte for
// byte only if every number is printed through this.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  require(res.ec == std::errc{}, ErrKind::Numeric, "format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrKind::Validation, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  require(!in.bad(), ErrKind::Validation, "read failed: " + path);
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrKind::Validation, "cannot open file for writing: " + path);
  out << content;
  out.flush();
  require(out.good(), ErrKind::Validation, "write failed: " + path);
}

}  // namespace gmlm
