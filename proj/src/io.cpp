#include "poinar/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

namespace poinar {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    out.push_back(line);
  }
  return out;
}

std::string cell_ref(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

}  // namespace

std::optional<std::chrono::sys_days> parse_date(const std::string& s) {
  using namespace std::chrono;
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) return std::nullopt;
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::string format_date(std::chrono::sys_days day) {
  using namespace std::chrono;
  const year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

CountPanel parse_counts(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty()) throw ParseError("counts file is empty");
  const std::vector<std::string> header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "series_id")
    throw ParseError("counts header must start with series_id followed by week dates");

  CountPanel panel;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto day = parse_date(header[c]);
    if (!day) throw ParseError("unparsable date '" + header[c] + "' in header column " + std::to_string(c + 1));
    panel.week_start.push_back(*day);
    panel.season_of.push_back(
        static_cast<int>(static_cast<unsigned>(std::chrono::year_month_day{*day}.month())));
  }
  const std::size_t T = header.size() - 1;
  const std::size_t L = lines.size() - 1;
  if (L == 0) throw ParseError("counts file has no series rows");
  panel.counts = CountMatrix(L, T);
  for (std::size_t r = 0; r < L; ++r) {
    const std::vector<std::string> cells = split_csv_line(lines[r + 1]);
    if (cells.size() != T + 1)
      throw ParseError("ragged row " + std::to_string(r + 2) + ": expected " + std::to_string(T + 1) +
                       " cells, found " + std::to_string(cells.size()));
    if (std::find(panel.series_ids.begin(), panel.series_ids.end(), cells[0]) != panel.series_ids.end())
      throw ParseError("duplicate series id '" + cells[0] + "' at row " + std::to_string(r + 2));
    panel.series_ids.push_back(cells[0]);
    for (std::size_t t = 0; t < T; ++t) {
      const std::string& cell = cells[t + 1];
      int v = 0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty())
        throw ParseError("non-integer cell '" + cell + "' at " + cell_ref(r + 2, t + 2));
      if (v < 0) throw ParseError("negative cell '" + cell + "' at " + cell_ref(r + 2, t + 2));
      panel.counts(r, t) = v;
    }
  }
  return panel;
}

CountPanel load_counts(const std::filesystem::path& path) { return parse_counts(read_file(path)); }

std::string format_counts(const CountPanel& panel) {
  std::ostringstream os;
  os << "series_id";
  for (std::size_t t = 0; t < panel.num_weeks(); ++t) {
    if (panel.week_start.empty()) throw std::invalid_argument("cannot write an undated panel as CSV");
    os << ',' << format_date(panel.week_start[t]);
  }
  os << '\n';
  for (std::size_t l = 0; l < panel.num_series(); ++l) {
    os << (panel.series_ids.empty() ? "s" + std::to_string(l + 1) : panel.series_ids[l]);
    for (std::size_t t = 0; t < panel.num_weeks(); ++t) os << ',' << panel.counts(l, t);
    os << '\n';
  }
  return os.str();
}

void save_counts(const CountPanel& panel, const std::filesystem::path& path) { write_file(path, format_counts(panel)); }

void attach_exposure_text(CountPanel& panel, const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty() || split_csv_line(lines[0]) != std::vector<std::string>{"series_id", "exposure"})
    throw ParseError("exposure header must be series_id,exposure");
  std::map<std::string, double> by_id;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> cells = split_csv_line(lines[r]);
    if (cells.size() != 2) throw ParseError("ragged exposure row " + std::to_string(r + 1));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cells[1], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cells[1].size() || cells[1].empty())
      throw ParseError("non-numeric exposure '" + cells[1] + "' at " + cell_ref(r + 1, 2));
    if (!(v > 0.0)) throw ParseError("exposure must be positive at " + cell_ref(r + 1, 2));
    if (!by_id.emplace(cells[0], v).second) throw ParseError("duplicate exposure for series " + cells[0]);
  }
  if (by_id.size() != panel.num_series())
    throw ParseError("exposure file lists " + std::to_string(by_id.size()) + " series, panel has " +
                     std::to_string(panel.num_series()));
  std::vector<double> exposure;
  for (const std::string& id : panel.series_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ParseError("no exposure for series " + id);
    exposure.push_back(it->second);
  }
  panel.exposure = std::move(exposure);
}

void attach_exposure(CountPanel& panel, const std::filesystem::path& path) {
  attach_exposure_text(panel, read_file(path));
}

std::string format_exposure(const CountPanel& panel) {
  if (!panel.exposure) throw std::invalid_argument("panel has no exposure");
  std::ostringstream os;
  os.precision(17);
  os << "series_id,exposure\n";
  char buf[32];
  for (std::size_t l = 0; l < panel.num_series(); ++l) {
    const auto res = std::to_chars(buf, buf + sizeof buf, (*panel.exposure)[l]);
    os << panel.series_ids[l] << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
  return os.str();
}

std::string format_draws(const PosteriorDraws& draws) {
  using nlohmann::json;
  std::string out;
  json header = {{"format", "poinar-draws"},
                 {"version", kDrawsFormatVersion},
                 {"mode", to_string(draws.mode)},
                 {"num_series", draws.num_series},
                 {"num_draws", draws.draws.size()}};
  header["exposure"] = draws.exposure ? json(*draws.exposure) : json(nullptr);
  out += header.dump() + "\n";
  for (const Draw& d : draws.draws) {
    json rec = {{"chain", d.chain}, {"iteration", d.iteration}, {"alpha", d.alpha}, {"z", d.z},
                {"phi_star", d.phi_star}, {"theta", d.theta}, {"tau", d.tau}};
    if (d.innovations) {
      json rows = json::array();
      for (std::size_t l = 0; l < d.innovations->rows(); ++l)
        rows.push_back(std::vector<int>(d.innovations->row(l), d.innovations->row(l) + d.innovations->cols()));
      rec["innovations"] = rows;
    }
    out += rec.dump() + "\n";
  }
  return out;
}

PosteriorDraws parse_draws(const std::string& text) {
  using nlohmann::json;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw IntegrityError("draws file is empty");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("unreadable draws header: ") + e.what());
  }
  if (header.value("format", "") != "poinar-draws") throw IntegrityError("not a draws file");
  if (header.value("version", -1) != kDrawsFormatVersion)
    throw IntegrityError("draws format version " + header.value("version", json(-1)).dump() + " is not supported");

  PosteriorDraws out;
  try {
    out.mode = parse_rate_mode(header.at("mode").get<std::string>());
    out.num_series = header.at("num_series").get<std::size_t>();
    if (!header.at("exposure").is_null()) out.exposure = header.at("exposure").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed draws header: ") + e.what());
  }
  const auto expected = header.value("num_draws", std::size_t{0});

  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    // Every record ends with a newline; a missing one means the file was cut.
    if (is.eof() && text.back() != '\n') throw IntegrityError("truncated draw record at line " + std::to_string(lineno));
    try {
      const json rec = json::parse(line);
      Draw d;
      d.chain = rec.at("chain").get<int>();
      d.iteration = rec.at("iteration").get<int>();
      d.alpha = rec.at("alpha").get<std::vector<double>>();
      d.z = rec.at("z").get<std::vector<int>>();
      d.phi_star = rec.at("phi_star").get<std::vector<double>>();
      d.theta = rec.at("theta").get<std::vector<double>>();
      d.tau = rec.at("tau").get<double>();
      if (rec.contains("innovations")) {
        const auto rows = rec.at("innovations").get<std::vector<std::vector<int>>>();
        CountMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t l = 0; l < rows.size(); ++l) {
          if (rows[l].size() != m.cols()) throw IntegrityError("ragged innovations at line " + std::to_string(lineno));
          for (std::size_t t = 0; t < m.cols(); ++t) m(l, t) = rows[l][t];
        }
        d.innovations = std::move(m);
      }
      if (d.alpha.size() != out.num_series || d.z.size() != out.num_series || d.theta.size() != kMonths)
        throw IntegrityError("draw at line " + std::to_string(lineno) + " has inconsistent lengths");
      for (int k : d.z)
        if (k < 0 || static_cast<std::size_t>(k) >= d.phi_star.size())
          throw IntegrityError("draw at line " + std::to_string(lineno) + " references a missing cluster");
      out.draws.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw IntegrityError("corrupt draw record at line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (out.draws.size() != expected)
    throw IntegrityError("draws file holds " + std::to_string(out.draws.size()) + " records, header promises " +
                         std::to_string(expected));
  return out;
}

void save_draws(const PosteriorDraws& draws, const std::filesystem::path& path) {
  write_file(path, format_draws(draws));
}

PosteriorDraws load_draws(const std::filesystem::path& path) { return parse_draws(read_file(path)); }

nlohmann::json truth_to_json(const ModelState& truth) {
  return {{"alpha", truth.alpha}, {"z", truth.z}, {"phi_star", truth.phi_star}, {"theta", truth.theta}};
}

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json j = {{"rmse", r.rmse},       {"rmse_se", r.rmse_se}, {"ape", r.ape},
                      {"bias", r.bias},       {"bias_se", r.bias_se}, {"n", r.n},
                      {"ape_n", r.ape_n},     {"ape_skipped", r.ape_skipped},
                      {"last_value_cap", r.last_value_cap}};
  nlohmann::json groups = nlohmann::json::object();
  for (const auto& [k, g] : r.by_last_value)
    groups[std::to_string(k)] = {{"n", g.n},       {"frequency", g.frequency}, {"rmse", g.rmse},
                                 {"rmse_se", g.rmse_se}, {"bias", g.bias},    {"bias_se", g.bias_se}};
  j["by_last_value"] = groups;
  return j;
}

std::string report_to_csv(const std::string& method, const EvalReport& r) {
  std::ostringstream os;
  os.precision(10);
  for (const auto& [k, g] : r.by_last_value)
    os << method << ',' << k << ',' << g.n << ',' << g.frequency << ',' << g.rmse << ',' << g.rmse_se << ','
       << g.bias << ',' << g.bias_se << '\n';
  os << method << ",overall," << r.n << ",1," << r.rmse << ',' << r.rmse_se << ',' << r.bias << ',' << r.bias_se
     << '\n';
  return os.str();
}

}  // namespace poinar
