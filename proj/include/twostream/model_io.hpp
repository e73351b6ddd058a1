#ifndef TWOSTREAM_MODEL_IO_HPP_
#define TWOSTREAM_MODEL_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twostream/distributions.hpp"
#include "twostream/premium.hpp"

namespace twostream {

// Malformed input file; the message carries the file name and line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CountRow {
  std::int64_t period = 0;
  std::uint64_t count = 0;
};

struct ClaimRow {
  std::int64_t period = 0;
  std::string claim_id;
  double amount = 0.0;
};

/// `period,count`; rows returned sorted by period. Periods must be unique.
std::vector<CountRow> read_counts_csv(const std::filesystem::path &path);
/// `period,claim_id,amount`; amounts > 0, (period, claim_id) unique.
std::vector<ClaimRow> read_claims_csv(const std::filesystem::path &path);

void write_counts_csv(const std::filesystem::path &path, const std::vector<CountRow> &rows);
void write_claims_csv(const std::filesystem::path &path, const std::vector<ClaimRow> &rows);

// One PeriodRecord per count row. With claims, every period gets its list
// of amounts (empty when none); claims for a period missing from the counts
// file are a ParseError. Without claims, severities stay unset.
std::vector<PeriodRecord> build_history(const std::vector<CountRow> &counts,
                                        const std::optional<std::vector<ClaimRow>> &claims);

struct FitMeta {
  std::uint64_t iterations = 0;
  double loglik = 0.0;
  double tol = 0.0;
  bool converged = false;
  std::string status;
  std::optional<std::uint64_t> seed;
  bool operator==(const FitMeta &) const = default;
};

struct ModelFile {
  static constexpr int kFormatVersion = 1;
  int format_version = kFormatVersion;
  std::optional<FreqParams> freq;
  std::optional<SevParams> sev;
  std::optional<FitMeta> freq_fit;
  std::optional<FitMeta> sev_fit;
  bool sev_nu_estimated = false;
  bool operator==(const ModelFile &) const = default;
};

std::string model_to_json(const ModelFile &model);
/// Throws ParseError on malformed JSON or an unsupported format_version.
ModelFile model_from_json(const std::string &text);
void save_model(const std::filesystem::path &path, const ModelFile &model);
ModelFile load_model(const std::filesystem::path &path);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

}  // namespace twostream

#endif  // TWOSTREAM_MODEL_IO_HPP_
