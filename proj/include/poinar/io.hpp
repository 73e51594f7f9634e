#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "poinar/gibbs.hpp"
#include "poinar/diagnostics.hpp"
#include "poinar/simulate.hpp"

namespace poinar {

/// Thrown when a persisted posterior file is truncated or inconsistent.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDrawsFormatVersion = 1;

/// Counts CSV: header `series_id,<YYYY-MM-DD>,...` (week-start dates), then
/// one row per series. The season map is the month of each week's start date.
CountPanel load_counts(const std::filesystem::path& path);
CountPanel parse_counts(const std::string& text);
std::string format_counts(const CountPanel& panel);
void save_counts(const CountPanel& panel, const std::filesystem::path& path);

/// Exposure CSV `series_id,exposure`, joined strictly against the panel ids.
void attach_exposure(CountPanel& panel, const std::filesystem::path& path);
void attach_exposure_text(CountPanel& panel, const std::string& text);
std::string format_exposure(const CountPanel& panel);

/// Line-delimited JSON: a header record, then one record per draw.
std::string format_draws(const PosteriorDraws& draws);
PosteriorDraws parse_draws(const std::string& text);
void save_draws(const PosteriorDraws& draws, const std::filesystem::path& path);
PosteriorDraws load_draws(const std::filesystem::path& path);

nlohmann::json truth_to_json(const ModelState& truth);
nlohmann::json report_to_json(const EvalReport& report);
std::string report_to_csv(const std::string& method, const EvalReport& report);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// "YYYY-MM-DD" -> sys_days; nullopt if malformed or not a calendar date.
std::optional<std::chrono::sys_days> parse_date(const std::string& s);
std::string format_date(std::chrono::sys_days day);

}  // namespace poinar
