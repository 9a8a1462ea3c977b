#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "entbound/bound_engine.hpp"
#include "entbound/boson_sim.hpp"
#include "entbound/datasets.hpp"
#include "entbound/spin_sim.hpp"
#include "entbound/tof_model.hpp"
#include "entbound/witness_oracle.hpp"

namespace entbound {

inline constexpr std::string_view kFormatVersion = "entbound v1";

/// Shortest-safe text for a double: 17 significant digits, "nan"/"inf" for
/// non-finite values.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

nlohmann::json load_json(const std::filesystem::path& path);
LatticeSpec load_lattice_spec(const std::filesystem::path& path);
TofCalibration load_calibration(const std::filesystem::path& path);

// structure factor -----------------------------------------------------------

SqDataset parse_sq_csv(std::istream& in, const std::string& source = "<stream>");
SqDataset load_sq_csv(const std::filesystem::path& path);
std::string format_sq_csv(const SqDataset& data);
SqDataset to_dataset(const StructureFactorGrid& grid, std::vector<std::string> comments = {});

// time-of-flight images ------------------------------------------------------

enum class TofFormat { automatic, csv, binary };

TofImage parse_tof_csv(std::istream& in, const TofCalibration& calib,
                       const std::string& source = "<stream>");
TofImage decode_tof_binary(std::string_view bytes, const TofCalibration& calib);
/// CSV (`x,y,n` or `kx,ky,n`) or binary ("ENTB", u32 nx, u32 ny, nx*ny
/// little-endian float64, row-major). Automatic mode picks binary for .bin
/// and .entb files or when the file starts with the magic.
TofImage load_tof(const std::filesystem::path& path, const TofCalibration& calib,
                  TofFormat format = TofFormat::automatic);
std::string format_tof_csv(const TofImage& image);
std::string encode_tof_binary(const TofImage& image);
void save_tof(const TofImage& image, const std::filesystem::path& path,
              TofFormat format = TofFormat::automatic);

/// Warning text when the integrated image deviates from <N> times the
/// integrated envelope by more than 20%; empty otherwise.
std::string tof_integral_warning(const TofImage& image, const TofCalibration& calib,
                                 double mean_number);

// bound maps -----------------------------------------------------------------

std::string format_bound_map(const BoundMap& map);
BoundMap parse_bound_map(std::istream& in, const std::string& source = "<stream>");
void save_bound_map(const BoundMap& map, const std::filesystem::path& path);
BoundMap load_bound_map(const std::filesystem::path& path);

// correlators and one-body density matrices ------------------------------------

std::string format_correlators_csv(const CorrelatorSet& corr,
                                   const std::vector<std::string>& comments = {});
/// Imports pair correlators. The format carries no Bloch components; they are
/// set to zero.
CorrelatorSet parse_correlators_csv(std::istream& in, const std::string& source = "<stream>");

std::string format_one_body_csv(const OneBodyDM& g, const std::vector<std::string>& comments = {});
OneBodyDM parse_one_body_csv(std::istream& in, const std::string& source = "<stream>");

std::string format_report_json(const OracleReport& report);

}  // namespace entbound
