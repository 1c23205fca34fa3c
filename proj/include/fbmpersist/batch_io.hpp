#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbmpersist/sampler.hpp"

namespace fbmpersist {

/// FNV-1a 64 over the raw coordinate bytes, hex encoded.
std::string points_digest(const std::vector<Point>& points);

/// Header shared by both batch formats: model, points digest, seed, count.
nlohmann::json batch_header(const SampleBatch& batch);

/// CSV: '#'-prefixed header lines (key=value), a column row p0..p{n-1},
/// then one row per realization.
void write_batch_csv(std::ostream& os, const SampleBatch& batch);

/// Binary: 8-byte magic "FBMPBAT1", little-endian u64 header length, header
/// JSON (which also carries the point coordinates), then count * n doubles in
/// row-major order.
void write_batch_binary(std::ostream& os, const SampleBatch& batch);
SampleBatch read_batch_binary(std::istream& is);

}  // namespace fbmpersist
