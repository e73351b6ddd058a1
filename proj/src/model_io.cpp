#include "twostream/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace twostream {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void fail(const std::filesystem::path &path, std::size_t line, const std::string &msg) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

template <typename T>
T parse_number(const std::string &s, const std::filesystem::path &path, std::size_t line,
               const char *what) {
  T value{};
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end) {
    fail(path, line, std::string("invalid ") + what + " '" + s + "'");
  }
  return value;
}

// Reads data lines after checking the header; blank lines are skipped.
template <typename F>
void for_each_row(const std::filesystem::path &path, const std::vector<std::string> &header,
                  F &&on_row) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!seen_header) {
      if (fields != header) {
        std::string want;
        for (const auto &h : header) want += (want.empty() ? "" : ",") + h;
        fail(path, lineno, "expected header '" + want + "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      fail(path, lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
    }
    on_row(fields, lineno);
  }
  if (!seen_header) fail(path, lineno, "missing header");
}

json freq_to_json(const FreqParams &f) {
  return {{"alpha1", f.alpha1}, {"alpha2", f.alpha2}, {"beta", f.beta}, {"p", f.p}};
}

json sev_to_json(const SevParams &s) {
  return {{"mu", s.mu}, {"delta", s.delta}, {"sigma", s.sigma}, {"nu", s.nu}};
}

json meta_to_json(const FitMeta &m) {
  json j = {{"iterations", m.iterations}, {"loglik", m.loglik},      {"tol", m.tol},
            {"converged", m.converged},   {"status", m.status}};
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  return j;
}

FitMeta meta_from_json(const json &j) {
  FitMeta m;
  m.iterations = j.at("iterations").get<std::uint64_t>();
  m.loglik = j.at("loglik").get<double>();
  m.tol = j.at("tol").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.status = j.value("status", std::string());
  if (j.contains("seed") && !j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

}  // namespace

std::vector<CountRow> read_counts_csv(const std::filesystem::path &path) {
  std::vector<CountRow> rows;
  std::set<std::int64_t> seen;
  for_each_row(path, {"period", "count"}, [&](const auto &f, std::size_t line) {
    CountRow r;
    r.period = parse_number<std::int64_t>(f[0], path, line, "period");
    if (!f[1].empty() && f[1][0] == '-') fail(path, line, "negative count '" + f[1] + "'");
    r.count = parse_number<std::uint64_t>(f[1], path, line, "count");
    if (!seen.insert(r.period).second) {
      fail(path, line, "duplicate period " + std::to_string(r.period));
    }
    rows.push_back(r);
  });
  std::sort(rows.begin(), rows.end(),
            [](const CountRow &a, const CountRow &b) { return a.period < b.period; });
  return rows;
}

std::vector<ClaimRow> read_claims_csv(const std::filesystem::path &path) {
  std::vector<ClaimRow> rows;
  std::set<std::pair<std::int64_t, std::string>> seen;
  for_each_row(path, {"period", "claim_id", "amount"}, [&](const auto &f, std::size_t line) {
    ClaimRow r;
    r.period = parse_number<std::int64_t>(f[0], path, line, "period");
    r.claim_id = f[1];
    if (r.claim_id.empty()) fail(path, line, "empty claim_id");
    r.amount = parse_number<double>(f[2], path, line, "amount");
    if (!(r.amount > 0.0) || !std::isfinite(r.amount)) {
      fail(path, line, "claim amount must be positive, got '" + f[2] + "'");
    }
    if (!seen.emplace(r.period, r.claim_id).second) {
      fail(path, line, "duplicate claim " + r.claim_id + " in period " + std::to_string(r.period));
    }
    rows.push_back(std::move(r));
  });
  return rows;
}

void write_counts_csv(const std::filesystem::path &path, const std::vector<CountRow> &rows) {
  std::string out = "period,count\n";
  for (const auto &r : rows) out += std::to_string(r.period) + "," + std::to_string(r.count) + "\n";
  write_text_file(path, out);
}

void write_claims_csv(const std::filesystem::path &path, const std::vector<ClaimRow> &rows) {
  std::string out = "period,claim_id,amount\n";
  for (const auto &r : rows) {
    out += std::to_string(r.period) + "," + r.claim_id + "," + format_double(r.amount) + "\n";
  }
  write_text_file(path, out);
}

std::vector<PeriodRecord> build_history(const std::vector<CountRow> &counts,
                                        const std::optional<std::vector<ClaimRow>> &claims) {
  std::map<std::int64_t, std::size_t> index;
  std::vector<PeriodRecord> out;
  for (const auto &c : counts) {
    index[c.period] = out.size();
    PeriodRecord r;
    r.count = c.count;
    if (claims) r.severities = std::vector<double>{};
    out.push_back(std::move(r));
  }
  if (claims) {
    for (const auto &c : *claims) {
      auto it = index.find(c.period);
      if (it == index.end()) {
        throw ParseError("claim " + c.claim_id + " refers to period " + std::to_string(c.period) +
                         ", which has no count row");
      }
      out[it->second].severities->push_back(c.amount);
    }
  }
  return out;
}

std::string model_to_json(const ModelFile &model) {
  json j;
  j["format_version"] = model.format_version;
  j["freq"] = model.freq ? freq_to_json(*model.freq) : json(nullptr);
  j["sev"] = model.sev ? sev_to_json(*model.sev) : json(nullptr);
  j["sev_nu_estimated"] = model.sev_nu_estimated;
  json fit = json::object();
  fit["freq"] = model.freq_fit ? meta_to_json(*model.freq_fit) : json(nullptr);
  fit["sev"] = model.sev_fit ? meta_to_json(*model.sev_fit) : json(nullptr);
  j["fit"] = fit;
  return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    ModelFile m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != ModelFile::kFormatVersion) {
      throw ParseError("unsupported model format_version " + std::to_string(m.format_version) +
                       " (expected " + std::to_string(ModelFile::kFormatVersion) + ")");
    }
    if (j.contains("freq") && !j["freq"].is_null()) {
      const auto &f = j["freq"];
      m.freq = FreqParams{f.at("alpha1").get<double>(), f.at("alpha2").get<double>(),
                          f.at("beta").get<double>(), f.at("p").get<double>()};
      validate(*m.freq);
    }
    if (j.contains("sev") && !j["sev"].is_null()) {
      const auto &s = j["sev"];
      m.sev = SevParams{s.at("mu").get<double>(), s.at("delta").get<double>(),
                        s.at("sigma").get<double>(), s.at("nu").get<double>()};
      validate(*m.sev);
    }
    m.sev_nu_estimated = j.value("sev_nu_estimated", false);
    if (j.contains("fit")) {
      const auto &fit = j["fit"];
      if (fit.contains("freq") && !fit["freq"].is_null()) m.freq_fit = meta_from_json(fit["freq"]);
      if (fit.contains("sev") && !fit["sev"].is_null()) m.sev_fit = meta_from_json(fit["sev"]);
    }
    return m;
  } catch (const json::exception &e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw ParseError(std::string("model file holds invalid parameters: ") + e.what());
  }
}

void save_model(const std::filesystem::path &path, const ModelFile &model) {
  write_text_file(path, model_to_json(model));
}

ModelFile load_model(const std::filesystem::path &path) {
  try {
    return model_from_json(read_text_file(path));
  } catch (const ParseError &e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace twostream
