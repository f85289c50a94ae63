#pragma once

#include <string>

#include "gmtlab/measure.hpp"

namespace gmtlab {

/// JSON form: {"dim": d, "points": [[...], ...], "weights": [...]}.
std::string measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const std::string& text, Duplicates duplicates = Duplicates::reject);

/// Binary form: "GMTM", u32 dim, u64 count, then each coordinate column and
/// the weight column as little-endian f64.
std::string measure_to_binary(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_binary(const std::string& bytes, Duplicates duplicates = Duplicates::reject);

/// Reads either format; binary is recognised by its magic.
DiscreteMeasure read_measure(const std::string& path, Duplicates duplicates = Duplicates::reject);

/// Writes binary when the path ends in ".gmtm", JSON otherwise. The file is
/// written to a temporary name and renamed into place.
void write_measure(const DiscreteMeasure& mu, const std::string& path);

/// Atomic whole-file write (temporary file + rename).
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace gmtlab
