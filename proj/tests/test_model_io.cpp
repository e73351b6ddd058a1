#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <unistd.h>

#include "twostream/model_io.hpp"
#include "twostream/rng.hpp"

using namespace twostream;
namespace fs = std::filesystem;

namespace {

// fresh scratch directory per test case
struct Scratch {
  fs::path dir;
  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("twostream_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path write(const std::string &name, const std::string &text) const {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
  }
};

template <class F>
std::string parse_message(F f) {
  try {
    f();
  } catch (const ParseError &e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("format_double round-trips") {
  Rng rng(RngSeed{17});
  for (int k = 0; k < 2000; ++k) {
    const double x = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.uniform() * 200) - 100);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(8.84) == "8.84");
  CHECK(std::stod(format_double(0.9039196)) == 0.9039196);
}

TEST_CASE("counts CSV") {
  Scratch s;
  const auto p = s.write("c.csv", "period,count\n3,4\n1,0\n2,7\n");
  const auto rows = read_counts_csv(p);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].period == 1);
  CHECK(rows[0].count == 0);
  CHECK(rows[2].period == 3);
  CHECK(rows[2].count == 4);

  const auto out = s.dir / "out.csv";
  write_counts_csv(out, rows);
  const auto again = read_counts_csv(out);
  REQUIRE(again.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(again[k].period == rows[k].period);
    CHECK(again[k].count == rows[k].count);
  }
}

TEST_CASE("counts CSV errors carry file and line") {
  Scratch s;
  const auto dup = s.write("dup.csv", "period,count\n1,2\n1,3\n");
  CHECK(parse_message([&] { read_counts_csv(dup); }).find("dup.csv:3") != std::string::npos);
  const auto neg = s.write("neg.csv", "period,count\n1,2\n2,-1\n");
  CHECK(parse_message([&] { read_counts_csv(neg); }).find("neg.csv:3") != std::string::npos);
  const auto junk = s.write("junk.csv", "period,count\n1,2\n2,x\n3,1\n");
  CHECK(parse_message([&] { read_counts_csv(junk); }).find("junk.csv:3") != std::string::npos);
  const auto header = s.write("hdr.csv", "when,count\n1,2\n");
  CHECK(parse_message([&] { read_counts_csv(header); }).find("hdr.csv:1") != std::string::npos);
  const auto cols = s.write("cols.csv", "period,count\n1,2,3\n");
  CHECK_THROWS_AS(read_counts_csv(cols), ParseError);
  CHECK_THROWS_AS(read_counts_csv(s.dir / "absent.csv"), IoError);
}

TEST_CASE("claims CSV") {
  Scratch s;
  const auto p = s.write("y.csv", "period,claim_id,amount\n1,a,2.5\n1,b,0.25\n3,a,1e-3\n");
  const auto rows = read_claims_csv(p);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].claim_id == "b");
  CHECK(rows[2].amount == 1e-3);

  const auto zero = s.write("zero.csv", "period,claim_id,amount\n1,a,0\n");
  CHECK(parse_message([&] { read_claims_csv(zero); }).find("zero.csv:2") != std::string::npos);
  const auto dup = s.write("dup.csv", "period,claim_id,amount\n1,a,1\n1,a,2\n");
  CHECK_THROWS_AS(read_claims_csv(dup), ParseError);
  const auto nan = s.write("nan.csv", "period,claim_id,amount\n1,a,nan\n");
  CHECK_THROWS_AS(read_claims_csv(nan), ParseError);

  const auto out = s.dir / "out.csv";
  write_claims_csv(out, rows);
  const auto again = read_claims_csv(out);
  REQUIRE(again.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(again[k].amount == rows[k].amount);
    CHECK(again[k].claim_id == rows[k].claim_id);
  }
}

TEST_CASE("build_history") {
  const std::vector<CountRow> counts{{1, 0}, {2, 2}, {3, 1}};
  const auto freq_only = build_history(counts, std::nullopt);
  REQUIRE(freq_only.size() == 3);
  CHECK_FALSE(freq_only[1].severities.has_value());

  const std::vector<ClaimRow> claims{{2, "a", 1.0}, {2, "b", 3.0}, {3, "a", 0.5}};
  const auto full = build_history(counts, claims);
  CHECK(full[0].severities->empty());
  CHECK(*full[1].severities == std::vector<double>{1.0, 3.0});
  CHECK(full[2].severities->size() == 1);

  const std::vector<ClaimRow> stray{{9, "a", 1.0}};
  CHECK_THROWS_AS(build_history(counts, stray), ParseError);
}

TEST_CASE("model JSON round-trips every digit") {
  ModelFile m;
  m.freq = FreqParams{97.55823456789012, 30.147, 0.019780712345678, 0.5929959};
  m.sev = SevParams{1.0000000000000002, 2.0089, 0.49999999999, 0.9039196};
  m.freq_fit = FitMeta{674, -1483.9718234, 1e-3, true, "converged", 77};
  m.sev_fit = FitMeta{12, -4321.5, 1e-3, false, "max_iterations", std::nullopt};
  m.sev_nu_estimated = true;
  CHECK(model_from_json(model_to_json(m)) == m);

  Scratch s;
  save_model(s.dir / "m.json", m);
  CHECK(load_model(s.dir / "m.json") == m);

  ModelFile partial;
  partial.freq = FreqParams{3, 1, 0.5, 0.6};
  CHECK(model_from_json(model_to_json(partial)) == partial);
}

TEST_CASE("model JSON validation") {
  CHECK_THROWS_AS(model_from_json("{"), ParseError);
  CHECK_THROWS_AS(model_from_json("[]"), ParseError);
  CHECK_THROWS_AS(model_from_json(R"({"format_version": 99})"), ParseError);
  CHECK_THROWS_AS(model_from_json(R"({"format_version": 1, "freq": {"alpha1": 1}})"), ParseError);
  CHECK_THROWS_AS(
      model_from_json(
          R"({"format_version": 1, "freq": {"alpha1": 1, "alpha2": 1, "beta": -1, "p": 0.5}})"),
      ParseError);
  CHECK(model_from_json(R"({"format_version": 1})") == ModelFile{});
}
