#pragma once

// File formats.
//
// Point set CSV: a header line "# dim=<d> n=<N> label=<text>", then one point
// per line with comma-separated coordinates in %.17g.
//
// Family directory: member_000.csv, member_001.csv, ... plus family.json:
//   {"generator_id", "params", "growth_variable", "growth_values", "sizes",
//    "files", "hashes"}
// where hashes are git blob ids of the member files.

#include "ddim/dimension.hpp"
#include "ddim/distances.hpp"
#include "ddim/energy.hpp"
#include "ddim/fekete.hpp"
#include "ddim/pointset.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ddim {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// %.17g
std::string format_double(double x);

std::string points_csv(const PointSet& a);
PointSet parse_points_csv(std::string_view text, const std::string& source = "<input>");
void save_points_csv(const PointSet& a, const fs::path& file);
PointSet load_points_csv(const fs::path& file);

json family_manifest(const SetFamily& f);
void save_family(const SetFamily& f, const fs::path& dir);
SetFamily load_family(const fs::path& dir);
/// A family directory, or a single CSV file read as a one-member family.
SetFamily load_family_or_points(const fs::path& path);

std::string read_file(const fs::path& file);
/// Writes atomically enough for our purposes: truncate and write, creating
/// parent directories.
void write_file(const fs::path& file, std::string_view content);

std::string sha256_hex(std::string_view data);
/// Hash of "blob <size>\0<data>" (SHA-1), as git computes for file contents.
std::string git_blob_hash(std::string_view data);

/// Energy table with provenance columns:
///   N,growth,beta,raw_sum,normalized,scale_invariant_ratio,diameter,
///   input_hash,generator,params
/// input_hash is the git blob id of the member's CSV serialization.
std::string energy_table_csv(const SetFamily& f, const std::vector<EnergyReport>& rows);

std::string csv_quote(std::string_view field);

json to_json(const LineFit& fit);
json to_json(const AdaptabilityVerdict& v);
json to_json(const DimensionEstimate& e);
json to_json(const BoxCountReport& r);
json to_json(const DistanceSummary& s);
json to_json(const FeketeResult& r);
json to_json(const TransfiniteCurve& c);
json to_json(const EnergyReport& r);

}  // namespace ddim
