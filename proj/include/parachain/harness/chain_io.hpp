#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "parachain/chain.hpp"
#include "parachain/errors.hpp"

namespace parachain::io {

// Chain CSV:
//   chain,iter,c1,...,cp
//   0,0,<x>,...        rows sorted by (chain, iter), both 0-based and consecutive
// Values are written with 17 significant digits, so a write/read cycle is
// lossless.

inline std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

inline void write_chains(const ChainSet& cs, std::ostream& out) {
  out << "chain,iter";
  for (std::size_t j = 1; j <= cs.p(); ++j) out << ",c" << j;
  out << '\n';
  for (std::size_t k = 0; k < cs.m(); ++k) {
    const auto& c = cs[k];
    for (std::size_t t = 0; t < c.n(); ++t) {
      out << k << ',' << t;
      for (double v : c.row(t)) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

inline void write_chains(const ChainSet& cs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  write_chains(cs, out);
  out.flush();
  if (!out) throw InputError("failed writing '" + path + "'");
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::size_t parse_index(std::string_view s, std::size_t line, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(s) + "'");
  return v;
}

inline double parse_value(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ParseError(line, "invalid number '" + std::string(s) + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value");
  return v;
}

}  // namespace detail

// Reads a chain CSV. Chains of unequal length raise UnequalChainLengths unless
// truncate_to_min is set, in which case every chain is cut to the shortest.
inline ChainSet read_chains(std::istream& in, bool truncate_to_min = false) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_fields(line);
  if (header.size() < 3 || header[0] != "chain" || header[1] != "iter")
    throw ParseError(lineno, "header must be chain,iter,c1,...,cp");
  const std::size_t p = header.size() - 2;
  for (std::size_t j = 0; j < p; ++j)
    if (header[j + 2] != "c" + std::to_string(j + 1))
      throw ParseError(lineno, "expected column c" + std::to_string(j + 1));

  std::vector<std::vector<double>> data;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != p + 2)
      throw ParseError(lineno, "expected " + std::to_string(p + 2) + " fields, got " +
                                   std::to_string(fields.size()));
    const std::size_t chain = detail::parse_index(fields[0], lineno, "chain id");
    const std::size_t iter = detail::parse_index(fields[1], lineno, "iteration");
    if (chain == data.size()) {
      data.emplace_back();
    } else if (chain + 1 != data.size()) {
      throw ParseError(lineno, "chain ids must be consecutive from 0 and sorted");
    }
    auto& values = data.back();
    if (iter != values.size() / p)
      throw ParseError(lineno, "iterations must be consecutive from 0 within each chain");
    for (std::size_t j = 0; j < p; ++j) values.push_back(detail::parse_value(fields[j + 2], lineno));
  }
  if (data.empty()) throw ParseError(lineno, "no data rows");

  std::size_t n_min = std::numeric_limits<std::size_t>::max();
  std::size_t n_max = 0;
  for (const auto& v : data) {
    n_min = std::min(n_min, v.size() / p);
    n_max = std::max(n_max, v.size() / p);
  }
  if (n_min != n_max && !truncate_to_min)
    throw UnequalChainLengths("chains have between " + std::to_string(n_min) + " and " +
                              std::to_string(n_max) + " iterations");
  std::vector<ChainMatrix> chains;
  chains.reserve(data.size());
  for (auto& v : data) {
    v.resize(n_min * p);
    chains.emplace_back(n_min, p, std::move(v));
  }
  return ChainSet(std::move(chains));
}

inline ChainSet read_chains(const std::string& path, bool truncate_to_min = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_chains(in, truncate_to_min);
}

}  // namespace parachain::io
