// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#include "htopt/io.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace htopt {

namespace {

inline std::uint32_t rotl32(std::uint32_t v, int bits) {
  return (v << bits) | (v >> (32 - bits));
}

}  // namespace

std::string sha1_hex(std::string_view data) {
  std::array<std::uint32_t, 5> h = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                                    0xC3D2E1F0u};

  // Pad to a multiple of 64 bytes: 0x80, zeros, 64-bit big-endian bit length.
  std::string msg(data);
  const std::uint64_t bit_len = static_cast<std::uint64_t>(msg.size()) * 8;
  msg.push_back(static_cast<char>(0x80));
  while (msg.size() % 64 != 56) msg.push_back('\0');
  for (int shift = 56; shift >= 0; shift -= 8)
    msg.push_back(static_cast<char>((bit_len >> shift) & 0xFF));

  std::array<std::uint32_t, 80> w{};
  for (std::size_t chunk = 0; chunk < msg.size(); chunk += 64) {
    for (int i = 0; i < 16; ++i) {
      w[static_cast<std::size_t>(i)] =
          (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i])) << 24) |
          (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i + 1])) << 16) |
          (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i + 2])) << 8) |
          static_cast<std::uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i + 3]));
    }
    for (int i = 16; i < 80; ++i)
      w[static_cast<std::size_t>(i)] = rotl32(
          w[static_cast<std::size_t>(i - 3)] ^ w[static_cast<std::size_t>(i - 8)] ^
              w[static_cast<std::size_t>(i - 14)] ^ w[static_cast<std::size_t>(i - 16)],
          1);

    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f;
      std::uint32_t k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t tmp = rotl32(a, 5) + f + e + k + w[static_cast<std::size_t>(i)];
      e = d;
      d = c;
      c = rotl32(b, 30);
      b = a;
      a = tmp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  std::string out(40, '0');
  static const char* kHex = "0123456789abcdef";
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 8; ++j) {
      out[static_cast<std::size_t>(8 * i + j)] =
          kHex[(h[static_cast<std::size_t>(i)] >> (28 - 4 * j)) & 0xF];
    }
  }
  return out;
}

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void atomic_write_file(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

void write_trace_csv(const std::string& path, const RunTrace& trace) {
  std::string out = "t,eta,true_grad_norm,est_error,objective,clipped_count\n";
  out.reserve(out.size() + trace.iterations.size() * 96);
  char line[256];
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const IterationRecord& rec = trace.iterations[i];
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g,%.17g,%d\n", i + 1, rec.eta,
                  rec.true_grad_norm, rec.est_error, rec.objective, rec.clipped_count);
    out += line;
  }
  atomic_write_file(path, out);
}

void write_xy_series(const std::string& path, const std::vector<double>& xs,
                     const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("series lengths differ");
  std::string out;
  out.reserve(xs.size() * 48);
  char line[96];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g %.17g\n", xs[i], ys[i]);
    out += line;
  }
  atomic_write_file(path, out);
}

}  // namespace htopt
