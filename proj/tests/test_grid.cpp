#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "radiomap/grid.hpp"
#include "radiomap/grid_io.hpp"

using namespace radiomap;

namespace {

std::filesystem::path temp_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "radiomap_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("normalize maps endpoints linearly") {
  Grid raw(2, 2);
  raw << 2, 4, 6, 10;
  const RadioMap m = normalize(raw);
  Grid want(2, 2);
  want << 0, 0.25, 0.5, 1.0;
  CHECK(m.values.isApprox(want, 1e-15));
  CHECK(m.norm_min == 2.0);
  CHECK(m.norm_max == 10.0);
  CHECK(denormalize(m).isApprox(raw, 1e-15));
  CHECK(renormalize_value(m, 8.0) == doctest::Approx(0.75));
}

TEST_CASE("constant map normalizes to zeros and back") {
  const Grid raw = Grid::Constant(2, 2, 5.0);
  const RadioMap m = normalize(raw);
  CHECK(m.values.isZero());
  CHECK(m.norm_min == 5.0);
  CHECK(m.norm_max == 5.0);
  CHECK(denormalize(m) == raw);
}

TEST_CASE("normalize rejects non-finite cells and names them") {
  Grid raw = Grid::Ones(3, 3);
  raw(1, 2) = std::numeric_limits<double>::quiet_NaN();
  try {
    normalize(raw);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find('1') != std::string::npos);
    CHECK(msg.find('2') != std::string::npos);
  }
}

TEST_CASE("rect mask and bounding rect") {
  const Rect r{1, 2, 3, 4};
  const Mask m = rect_mask(6, 8, r);
  CHECK(m.count() == 12);
  CHECK(m(1, 2));
  CHECK(m(3, 5));
  CHECK_FALSE(m(4, 5));
  CHECK(bounding_rect(m) == r);
  CHECK_THROWS_AS(rect_mask(6, 8, Rect{4, 6, 3, 3}), Error);
}

TEST_CASE("region state transitions") {
  const RadioMap map = normalize(Grid::Random(5, 5));
  RegionState s = init_region_state(map, Rect{1, 1, 2, 2});
  CHECK(s.missing_count() == 4);
  CHECK(s.observed_count() == 21);
  CHECK(s.confidence(0, 0) == 1.0);
  CHECK(s.confidence(1, 1) == 0.0);
  CHECK(s.restricted_mask().count() == 4);

  s.mark_filled({1, 1}, 0.5);
  CHECK(s.status(1, 1) == CellStatus::Filled);
  CHECK(s.confidence(1, 1) == 0.5);
  CHECK(s.missing_count() == 3);
  CHECK(s.filled_count() == 1);
  CHECK(s.is_known(1, 1));
  CHECK_FALSE(s.original_observed()(1, 1));

  CHECK_THROWS_AS(s.mark_filled({1, 1}, 0.5), Error);
  CHECK_THROWS_AS(s.mark_filled({0, 0}, 0.5), Error);
  CHECK_THROWS_AS(s.mark_filled({2, 2}, 0.0), Error);
  CHECK_THROWS_AS(s.mark_filled({2, 2}, 1.5), Error);
}

TEST_CASE("csv round trip is exact") {
  Grid g(3, 4);
  g << 0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0, 7, 3.141592653589793, -1, 2, 4, 6, 8;
  const Grid back = parse_grid(format_grid(g));
  CHECK(back == g);

  const auto dir = temp_dir("csv");
  write_grid_file(dir / "g.csv", g);
  CHECK(read_grid_file(dir / "g.csv") == g);
}

TEST_CASE("csv errors carry line numbers") {
  try {
    parse_grid("1,2,3\n4,5\n", "ragged.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("ragged.csv") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
  try {
    parse_grid("1,2\n3,abc\n", "bad.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("abc") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_grid("", "empty.csv"), Error);
  CHECK_NOTHROW(parse_grid("1, 2\r\n3 ,4\n\n"));
}

TEST_CASE("mask files hold 0/1 only") {
  const auto dir = temp_dir("mask");
  Mask m = Mask::Constant(3, 4, false);
  m(1, 2) = true;
  write_mask_file(dir / "m.csv", m);
  CHECK((read_mask_file(dir / "m.csv") == m).all());

  write_text_file(dir / "bad.csv", "0,1\n2,0\n");
  CHECK_THROWS_AS(read_mask_file(dir / "bad.csv"), Error);
}

TEST_CASE("pgm output is binary 8-bit") {
  const auto dir = temp_dir("pgm");
  Grid g(1, 3);
  g << 0.0, 0.5, 1.0;
  write_pgm(dir / "g.pgm", g);
  const std::string bytes = read_text_file(dir / "g.pgm");
  const std::string header = "P5\n3 1\n255\n";
  REQUIRE(bytes.size() == header.size() + 3);
  CHECK(bytes.substr(0, header.size()) == header);
  CHECK(static_cast<unsigned char>(bytes[header.size()]) == 0);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 1]) == 128);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 2]) == 255);
}
