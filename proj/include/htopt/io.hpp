// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "htopt/optimizers.hpp"

namespace htopt {

// SHA-1 digest as 40 lowercase hex characters. Used to fingerprint resolved
// configurations in summary files.
std::string sha1_hex(std::string_view data);

// Shortest-faithful decimal rendering with 17 significant digits.
std::string format_g17(double value);

// Writes content to path via a temporary file in the same directory plus an
// atomic rename, creating parent directories as needed. Readers never observe
// a half-written file.
void atomic_write_file(const std::string& path, std::string_view content);

// Per-iteration trace as CSV with header
// t,eta,true_grad_norm,est_error,objective,clipped_count.
void write_trace_csv(const std::string& path, const RunTrace& trace);

// Two-column whitespace-separated series, one "x y" pair per line.
void write_xy_series(const std::string& path, const std::vector<double>& xs,
                     const std::vector<double>& ys);

}  // namespace htopt
