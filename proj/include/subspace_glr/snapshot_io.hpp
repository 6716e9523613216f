#pragma once

#include <filesystem>
#include <string>

#include "subspace_glr/model.hpp"

namespace subspace_glr {

/// Text layout: 2L data rows, the first L for Y_s and the next L for Y_r;
/// each row holds 2N comma-separated numbers re_1,im_1,...,re_N,im_N. Blank
/// lines and lines starting with '#' are ignored.
SnapshotData read_snapshots_csv(const std::filesystem::path& path);
void write_snapshots_csv(const SnapshotData& data, const std::filesystem::path& path);

/// Binary layout, little-endian: the 8 bytes "SGLRSNP1", then uint32
/// version (1), L, N and a reserved zero word, then Y_s and Y_r row-major as
/// float32 (re, im) pairs.
SnapshotData read_snapshots_binary(const std::filesystem::path& path);
void write_snapshots_binary(const SnapshotData& data, const std::filesystem::path& path);

/// Picks the reader from the leading magic bytes.
SnapshotData read_snapshots(const std::filesystem::path& path);

/// {"u_s": [[re, im], ...], "u_r": [[re, im], ...]}; both vectors must be
/// unit norm to within `tol`.
SteeringPair read_steering_json(const std::filesystem::path& path, double tol = 1e-9);
SteeringPair parse_steering_json(const std::string& text, double tol = 1e-9);
void write_steering_json(const SteeringPair& steering, const std::filesystem::path& path);

}  // namespace subspace_glr
