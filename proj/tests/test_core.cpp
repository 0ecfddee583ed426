// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#include "censorfc/core.hpp"
#include "censorfc/errors.hpp"
#include "censorfc/io.hpp"
#include "censorfc/random.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>

using namespace censorfc;
namespace fs = std::filesystem;

namespace {
void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}
}  // namespace

TEST_SUITE("core") {
  TEST_CASE("edge_index examples") {
    CHECK(edge_index(0, 1, 3) == 0);
    CHECK(edge_index(1, 2, 3) == 2);
    CHECK(edge_index(417, 418, 419) == 87570);
    CHECK_THROWS_AS(edge_index(2, 1, 3), ArgumentError);
    CHECK_THROWS_AS(edge_index(1, 1, 3), ArgumentError);
    CHECK_THROWS_AS(edge_index(1, 3, 3), ArgumentError);
  }

  TEST_CASE("edge_index round-trips exhaustively for P in 2..50") {
    for (std::size_t p = 2; p <= 50; ++p) {
      std::size_t expected = 0;
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
          REQUIRE(edge_index(i, j, p) == expected);
          const auto [a, b] = edge_pair(expected, p);
          REQUIRE(a == i);
          REQUIRE(b == j);
          ++expected;
        }
      CHECK(expected == edge_count(p));
      CHECK(parcels_for_edges(expected) == p);
    }
    CHECK_THROWS_AS(parcels_for_edges(4), ShapeError);
  }

  TEST_CASE("ParcelTimeseries validation") {
    CHECK_NOTHROW(ParcelTimeseries(Matrix::Zero(10, 3), 0.72));
    CHECK_THROWS_AS(ParcelTimeseries(Matrix::Zero(1, 3), 0.72), ShapeError);
    CHECK_THROWS_AS(ParcelTimeseries(Matrix::Zero(10, 1), 0.72), ShapeError);
    CHECK_THROWS_AS(ParcelTimeseries(Matrix::Zero(10, 3), 0.0), ValidationError);
    Matrix bad = Matrix::Zero(4, 3);
    bad(2, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(ParcelTimeseries(bad, 1.0), ValidationError);
  }

  TEST_CASE("ParcelTimeseries head and select") {
    Matrix m(4, 2);
    m << 1, 2, 3, 4, 5, 6, 7, 8;
    const ParcelTimeseries ts(m, 2.0, "r", "p");
    CHECK(ts.head(2).volumes() == 2);
    CHECK(ts.duration_minutes() == doctest::Approx(8.0 / 60.0));
    const auto s = ts.select({true, false, false, true});
    REQUIRE(s.volumes() == 2);
    CHECK(s.data()(1, 1) == 8.0);
    CHECK(s.run_id() == "r");
  }

  TEST_CASE("censor level names") {
    for (auto l : {CensorLevel::None, CensorLevel::Lenient, CensorLevel::Stringent, CensorLevel::Expanded})
      CHECK(parse_censor_level(to_string(l)) == l);
    CHECK_THROWS_AS(parse_censor_level("medium"), ArgumentError);
  }

  TEST_CASE("FcMatrix validation and correlation matrix") {
    FcMatrix fc{Vector::Constant(3, std::atanh(0.5)), 10, 3};
    CHECK_NOTHROW(fc.validate());
    const Matrix r = fc.to_correlation_matrix();
    CHECK(r(0, 0) == 1.0);
    CHECK(r(1, 2) == doctest::Approx(0.5));
    CHECK(r(2, 1) == doctest::Approx(0.5));
    fc.z(1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fc.validate(), ValidationError);
    FcMatrix wrong{Vector::Zero(4), 10, 3};
    CHECK_THROWS_AS(wrong.validate(), ShapeError);
  }

  TEST_CASE("CohortTable keys, raggedness and means") {
    CohortTable t;
    t.add("a", "s1", "fd", 1.0);
    t.add("a", "s2", "fd", 3.0);
    t.add("b", "s1", "fd", 5.0);
    CHECK_THROWS_AS(t.add("a", "s1", "fd", 2.0), ValidationError);
    CHECK_THROWS_AS(t.add("c", "s1", "fd", std::nan("")), ValidationError);
    CHECK(t.participants() == std::vector<std::string>{"a", "b"});
    CHECK(t.sessions("b").size() == 1);
    CHECK(!t.value("b", "s2", "fd"));
    const auto means = t.participant_means("fd");
    REQUIRE(means.size() == 2);
    CHECK(means[0].second == 2.0);
    CHECK(means[1].second == 5.0);
  }

  TEST_CASE("CensorMask accessors") {
    auto m = CensorMask::keep_all(5);
    CHECK(m.kept() == 5);
    m.keep[1] = m.keep[3] = false;
    CHECK(m.censored_indices() == std::vector<std::size_t>{1, 3});
  }
}

TEST_SUITE("core") {
  TEST_CASE("load_timeseries drops initial volumes by default") {
    const auto dir = testing::scratch_dir("core_load");
    Rng rng(1);
    const ParcelTimeseries ts(testing::random_matrix(rng, 40, 4), 0.72);
    io::save_timeseries(dir / "ts.csv", ts, io::Format::Csv);
    const auto loaded = io::load_timeseries(dir / "ts.csv", 0.72);
    CHECK(loaded.volumes() == 25);
    CHECK(loaded.data()(0, 0) == ts.data()(15, 0));
    io::LoadOptions keep_all;
    keep_all.drop_initial = 0;
    CHECK(io::load_timeseries(dir / "ts.csv", 0.72, keep_all).volumes() == 40);
  }

  TEST_CASE("zeros table is a valid series") {
    const auto dir = testing::scratch_dir("core_zeros");
    std::string s;
    for (int r = 0; r < 10; ++r) s += "0,0,0\n";
    write_text(dir / "z.csv", s);
    io::LoadOptions opt;
    opt.drop_initial = 0;
    const auto ts = io::load_timeseries(dir / "z.csv", 1.0, opt);
    CHECK(ts.volumes() == 10);
    CHECK(ts.parcels() == 3);
  }

  TEST_CASE("ingestion errors") {
    const auto dir = testing::scratch_dir("core_errors");
    io::LoadOptions opt;
    opt.drop_initial = 0;
    write_text(dir / "nan.csv", "1,2\n3,NaN\n5,6\n");
    CHECK_THROWS_AS(io::load_timeseries(dir / "nan.csv", 1.0, opt), ValidationError);
    write_text(dir / "text.csv", "1,2\n3,abc\n5,6\n");
    try {
      io::load_timeseries(dir / "text.csv", 1.0, opt);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == 2);
      CHECK(e.col() == 2);
    }
    write_text(dir / "ragged.csv", "1,2\n3\n5,6\n");
    CHECK_THROWS_AS(io::load_timeseries(dir / "ragged.csv", 1.0, opt), ShapeError);
    CHECK_THROWS_AS(io::load_timeseries(dir / "missing.csv", 1.0, opt), IoError);
  }

  TEST_CASE("timeseries round-trip: binary exact, text to 1e-12") {
    const auto dir = testing::scratch_dir("core_roundtrip");
    Rng rng(7);
    Matrix m = testing::random_matrix(rng, 33, 5) * 1e3;
    m(0, 0) = 1e-300;
    m(1, 1) = -123456.789012345678;
    const ParcelTimeseries ts(m, 0.8, "run-1", "sub-1");
    io::LoadOptions opt;
    opt.drop_initial = 0;
    io::save_timeseries(dir / "ts.bin", ts, io::Format::Binary);
    CHECK(io::is_binary_timeseries(dir / "ts.bin"));
    const auto b = io::load_timeseries(dir / "ts.bin", 0.0, opt);
    CHECK(b.data() == m);
    CHECK(b.tr_seconds() == 0.8);
    io::save_timeseries(dir / "ts.csv", ts, io::Format::Csv);
    const auto c = io::load_timeseries(dir / "ts.csv", 0.8, opt);
    const double rel = (c.data() - m).cwiseAbs().maxCoeff() / m.cwiseAbs().maxCoeff();
    CHECK(rel <= 1e-12);
  }

  TEST_CASE("FC round-trip: binary exact, text to 1e-12") {
    const auto dir = testing::scratch_dir("core_fc");
    Rng rng(9);
    FcMatrix fc{testing::random_vector(rng, 45) * 0.3, 321, 10};
    for (auto fmt : {io::Format::Binary, io::Format::Csv}) {
      const fs::path p = dir / (fmt == io::Format::Binary ? "fc.bin" : "fc.csv");
      io::save_fc(p, fc, fmt);
      const auto back = io::load_fc(p);
      CHECK(back.parcel_count == 10);
      CHECK(back.n_volumes_retained == 321);
      const double err = (back.z - fc.z).cwiseAbs().maxCoeff() / fc.z.cwiseAbs().maxCoeff();
      if (fmt == io::Format::Binary)
        CHECK(err == 0.0);
      else
        CHECK(err <= 1e-12);
    }
  }

  TEST_CASE("sidecar, mask and cohort round-trip") {
    const auto dir = testing::scratch_dir("core_misc");
    io::write_sidecar(dir / "r.json", {"sub-1", "run-1", 0.72});
    const auto meta = io::read_sidecar(dir / "r.json");
    CHECK(meta.participant_id == "sub-1");
    CHECK(meta.tr_seconds == 0.72);
    CHECK(io::sidecar_path("a/run.csv") == fs::path("a/run.json"));
    const KeepVector k{true, false, true, true};
    io::write_mask(dir / "m.txt", k);
    CHECK(io::read_mask(dir / "m.txt") == k);
    CohortTable t;
    t.add("a", "s1", "mean_fd", 0.1);
    t.add("a", "s2", "mean_fd", 0.30000000000000004);
    io::write_cohort(dir / "c.csv", t);
    const auto back = io::read_cohort(dir / "c.csv");
    CHECK(back.size() == 2);
    CHECK(*back.value("a", "s2", "mean_fd") == 0.30000000000000004);
  }

  TEST_CASE("format_double is shortest round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0})
      CHECK(std::stod(io::format_double(v)) == v);
    CHECK(io::format_double(0.1) == "0.1");
  }

  TEST_CASE("atomic write leaves no temporary") {
    const auto dir = testing::scratch_dir("core_atomic");
    io::write_file_atomic(dir / "x.json", "{}");
    io::write_file_atomic(dir / "x.json", "{\"a\":1}");
    CHECK(io::read_file(dir / "x.json") == "{\"a\":1}");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 1);
  }
}

TEST_SUITE("core") {
  TEST_CASE("Philox known-answer vectors") {
    using B = Philox4x32::Block;
    CHECK(Philox4x32::bijection({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::bijection({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::bijection({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("streams are reproducible and distinct") {
    Philox4x32 a(42, 3), b(42, 3), c(42, 4);
    bool differs = false;
    for (int i = 0; i < 16; ++i) {
      const auto x = a();
      CHECK(x == b());
      differs |= x != c();
    }
    CHECK(differs);
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  }
}
