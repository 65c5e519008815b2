#pragma once

#include <string>
#include <vector>

#include "twhe/cover.hpp"
#include "twhe/fields.hpp"
#include "twhe/metric.hpp"
#include "twhe/twist.hpp"

namespace twhe {

// Binary grid-field container. Layout (little endian):
//   header      magic "TWHEFLD1", u32 complex_dim, u32 resolution,
//               f64 periods[2n], u32 fd_order
//   chart table u32 n_banded, i32 banded_axes[n_banded]
//   field table u32 n_fields, per field: u32 name_len, name bytes,
//               i32 chart (-1 = chart of record), u8 form type, u32 rank,
//               u32 components, u64 offset (in complex values)
//   payload     interleaved (re, im) f64, each field contiguous
struct FieldRecord {
  std::string name;
  int chart = -1;
  MatrixField field;
};

struct FieldContainer {
  GridPtr grid;
  std::vector<int> banded_axes;
  std::vector<FieldRecord> fields;

  const FieldRecord* find(const std::string& name, int chart = -1) const;
  const FieldRecord& require(const std::string& name, int chart = -1) const;
  void add(std::string name, int chart, MatrixField f);
};

void write_container(const std::string& path, const FieldContainer& c);
// Throws ConfigError on a malformed file.
FieldContainer read_container(const std::string& path);

// Metric: fields "metric" per chart plus an optional global "conformal_log".
FieldContainer metric_container(const MetricField& H);
MetricField metric_from_container(const FieldContainer& c, CoverPtr cover);

// Twist: "B" per chart (1,1), "beta:i:j" (1,0), "alpha:i:j:k" (scalar),
// with i < j < k. Missing entries mean zero / one.
FieldContainer twist_container(const TwistData& t);
TwistPtr twist_from_container(const FieldContainer& c, CoverPtr cover, std::string id);

}  // namespace twhe
