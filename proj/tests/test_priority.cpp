#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "radiomap/priority.hpp"

using namespace radiomap;

namespace {

RadioMap zero_map(Index rows, Index cols) {
  RadioMap m;
  m.values = Grid::Zero(rows, cols);
  return m;
}

PriorityConfig cfg_with(int n) {
  PriorityConfig c;
  c.patch_size = n;
  return c;
}

BoundaryPoint at(Index r, Index c, Vec2 normal) { return {{r, c}, normal.normalized()}; }

} // namespace

TEST_CASE("boundary of a centred 3x3 hole is its ring") {
  const RadioMap map = zero_map(5, 5);
  const RegionState s = init_region_state(map, Rect{1, 1, 3, 3});
  const auto b = extract_boundary(s);
  REQUIRE(b.size() == 8);
  for (const auto& p : b) {
    CHECK_FALSE(p.coord == CellCoord{2, 2});
    CHECK(p.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("single missing cell uses the neighbour fallback") {
  const RadioMap map = zero_map(5, 5);
  const RegionState s = init_region_state(map, Rect{2, 2, 1, 1});
  const auto b = extract_boundary(s);
  REQUIRE(b.size() == 1);
  CHECK(b[0].coord == CellCoord{2, 2});
  CHECK(b[0].normal.isApprox(Vec2(-1, 0)));
}

TEST_CASE("boundary extraction edge cases") {
  const RadioMap map = zero_map(4, 4);
  CHECK(extract_boundary(init_region_state(map, Mask::Constant(4, 4, false))).empty());
  CHECK_THROWS_AS(extract_boundary(init_region_state(map, Mask::Constant(4, 4, true))), Error);
}

TEST_CASE("boundary matches the brute-force adjacency scan on random masks") {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution coin(0.35);
  const RadioMap map = zero_map(12, 12);
  for (int t = 0; t < 200; ++t) {
    Mask m(12, 12);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = coin(rng);
    if (m.all() || !m.any()) continue;
    const RegionState s = init_region_state(map, m);
    const auto got = extract_boundary(s);
    const auto want = oracle::boundary_cells(s);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].coord == want[i]);
      CHECK(got[i].normal.norm() == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("confidence term") {
  const RadioMap map = zero_map(7, 7);
  SUBCASE("fully observed window") {
    const RegionState s = init_region_state(map, Rect{0, 0, 1, 1});
    CHECK(confidence_term(s, {3, 3}, 3) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("fully missing window") {
    const RegionState s = init_region_state(map, Rect{1, 1, 5, 5});
    CHECK(confidence_term(s, {3, 3}, 3) == 0.0);
  }
  SUBCASE("mixed window: five observed, one filled at 0.6, three missing") {
    // window rows 2..4, cols 2..4; missing column 4 plus (3,3) later filled
    Mask m = Mask::Constant(7, 7, false);
    m(2, 4) = m(3, 4) = m(4, 4) = true;
    m(3, 3) = true;
    RegionState s = init_region_state(map, m);
    s.mark_filled({3, 3}, 0.6);
    const double want = (5.0 + 0.6) / 9.0;
    CHECK(std::abs(confidence_term(s, {3, 3}, 3) - want) <= 1e-9);
    CHECK(std::abs(oracle::confidence(s, {3, 3}, 3) - want) <= 1e-9);
  }
  SUBCASE("cells outside the grid count as zero, divisor stays n^2") {
    const RegionState s = init_region_state(map, Rect{6, 6, 1, 1});
    CHECK(confidence_term(s, {0, 0}, 3) == doctest::Approx(4.0 / 9.0));
  }
}

TEST_CASE("confidence never rises when a window cell goes missing") {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.3);
  const RadioMap map = zero_map(9, 9);
  for (int t = 0; t < 50; ++t) {
    Mask m(9, 9);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = coin(rng);
    m(4, 4) = false;
    const RegionState before = init_region_state(map, m);
    Mask more = m;
    more(4, 4) = true;
    const RegionState after = init_region_state(map, more);
    CHECK(confidence_term(after, {4, 4}, 5) <= confidence_term(before, {4, 4}, 5));
  }
}

TEST_CASE("data term analytic cases") {
  const PriorityConfig cfg = cfg_with(3);
  CHECK(data_term(Vec2(1, 0), Vec2(1, 0), cfg) == 1.0);
  CHECK(data_term(Vec2(0, 1), Vec2(1, 0), cfg) == cfg.term_floor);
  CHECK(data_term(Vec2::Zero(), Vec2(1, 0), cfg) == cfg.term_floor);

  // ramp U(r, c) = c / Q: gradient along columns, isophote along rows
  const Index P = 12, Q = 12;
  RadioMap map = zero_map(P, Q);
  for (Index c = 0; c < Q; ++c) map.values.col(c).setConstant(static_cast<double>(c) / Q);

  SUBCASE("vertical front (normal along columns) -> floor") {
    const RegionState s = init_region_state(map, Rect{0, 6, P, 6});
    const auto b = extract_boundary(s);
    REQUIRE_FALSE(b.empty());
    const BoundaryPoint& p = b[b.size() / 2];
    CHECK(std::abs(p.normal.y()) == doctest::Approx(1.0));
    CHECK(data_term(map, s, p, cfg) == doctest::Approx(cfg.term_floor).epsilon(1e-12));
  }
  SUBCASE("horizontal front (normal along rows) -> 1") {
    const RegionState s = init_region_state(map, Rect{6, 0, 6, Q});
    const auto b = extract_boundary(s);
    const BoundaryPoint& p = b[b.size() / 2];
    CHECK(std::abs(p.normal.x()) == doctest::Approx(1.0));
    CHECK(data_term(map, s, p, cfg) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("radio term analytic cases") {
  PriorityConfig cfg = cfg_with(3);
  const Transmitter tx{Vec2(0, 0), 0};
  CHECK(std::abs(radio_term(tx, at(1, 0, Vec2(1, 0)), cfg) - 1.0) <= 1e-9);
  CHECK(std::abs(radio_term(tx, at(2, 0, Vec2(1, 0)), cfg) - 0.25) <= 1e-9);
  // perpendicular: alignment floored, distance factor kept
  CHECK(radio_term(tx, at(0, 2, Vec2(-1, 0)), cfg) == doctest::Approx(0.25 * cfg.term_floor));

  cfg.beta = 1.0;
  // d = 5 along the row axis, normal 60 degrees away
  const double a = std::numbers::pi / 3.0;
  const BoundaryPoint p{{5, 0}, Vec2(std::cos(a), std::sin(a))};
  CHECK(std::abs(radio_term(tx, p, cfg) - 0.1) <= 1e-9);

  CHECK_THROWS_AS(radio_term(tx, at(0, 0, Vec2(1, 0)), cfg), Error);
}

TEST_CASE("radio term is rotation invariant and decreasing in distance") {
  PriorityConfig cfg = cfg_with(3);
  const double angle = 0.4;
  double prev = std::numeric_limits<double>::infinity();
  for (int d = 1; d <= 200; ++d) {
    const Transmitter tx{Vec2(0, 0), 0};
    const BoundaryPoint p{{d, 0}, Vec2(std::cos(angle), std::sin(angle))};
    const double l = radio_term(tx, p, cfg);
    CHECK(l < prev);
    prev = l;
    // same geometry rotated by 90 degrees
    const BoundaryPoint q{{0, d}, Vec2(-std::sin(angle), std::cos(angle))};
    CHECK(radio_term(tx, q, cfg) == doctest::Approx(l).epsilon(1e-12));
  }
}

TEST_CASE("block term") {
  PriorityConfig cfg = cfg_with(3);
  SUBCASE("obstacle-free map") {
    const ObstacleMap obs = ObstacleMap::empty(10, 10);
    for (Index r = 0; r < 10; ++r) {
      CHECK(block_term(obs, Transmitter{Vec2(-5, 3), 0}, {r, 9 - r}, cfg) == 1.0);
    }
  }
  SUBCASE("segment inside a building -> floor") {
    ObstacleMap obs{Mask::Constant(10, 10, true)};
    CHECK(block_term(obs, Transmitter{Vec2(2, 2), 0}, {7, 7}, cfg) == cfg.term_floor);
  }
  SUBCASE("ten cells crossing a four-cell building") {
    ObstacleMap obs = ObstacleMap::empty(11, 12);
    for (Index c = 3; c <= 6; ++c) obs.cells.col(c).setConstant(true);
    // tx centre (5,0) to p centre (5,10), both inside the grid: length 10
    const double got = block_term(obs, Transmitter{Vec2(5, 0), 0}, {5, 10}, cfg);
    CHECK(std::abs(got - 0.6) <= cfg.line_step / 10.0 + 1e-12);
  }
  SUBCASE("sampled fraction tracks the exact covered length") {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.3);
    std::uniform_real_distribution<double> u(-20.0, 40.0);
    ObstacleMap obs = ObstacleMap::empty(20, 20);
    for (Index i = 0; i < obs.cells.size(); ++i) obs.cells.data()[i] = coin(rng);
    for (int t = 0; t < 100; ++t) {
      const Vec2 from(u(rng), u(rng));
      const CellCoord p{static_cast<Index>(rng() % 20), static_cast<Index>(rng() % 20)};
      const double exact = oracle::exact_blocked_fraction(obs, from, p.as_vector());
      const double sampled = blocked_fraction(obs, from, p.as_vector(), cfg.line_step);
      const double length =
          oracle::clipped_length(from, p.as_vector(), Vec2(-0.5, -0.5), Vec2(19.5, 19.5));
      if (length < 1.0) continue;
      // every sample misattributes at most one step of length at each cell crossing
      const double crossings = std::abs(from.x() - p.row) + std::abs(from.y() - p.col) + 2.0;
      CHECK(std::abs(exact - sampled) <= (crossings * cfg.line_step) / length + 1e-9);
    }
  }
}

TEST_CASE("priority combination") {
  const std::vector<PropagationTerms> ones{{1.0, 1.0}};
  CHECK(combine_priority(1.0, 1.0, ones, PriorityMode::Full) == 1.0);

  const std::vector<PropagationTerms> two{{1.0, 0.25}, {0.5, 0.04}};
  CHECK(std::abs(combine_priority(0.5, 0.8, two, PriorityMode::Full) - 0.108) <= 1e-9);
  CHECK(combine_priority(0.5, 0.8, two, PriorityMode::TextureOnly) == doctest::Approx(0.4));
  CHECK_THROWS_AS(combine_priority(0.5, 0.8, {}, PriorityMode::Full), Error);
}

TEST_CASE("one-transmitter sum equals the plain product") {
  std::mt19937_64 rng(9);
  RadioMap map = zero_map(20, 20);
  map.values = (Grid::Random(20, 20).array() + 1.0) / 2.0;
  ObstacleMap obs = ObstacleMap::empty(20, 20);
  obs.cells.block(0, 8, 20, 3).setConstant(true);
  const RegionState s = init_region_state(map, Rect{6, 5, 8, 8});
  const Transmitter tx{Vec2(-7.5, 3.25), 0};
  const PriorityConfig cfg = cfg_with(5);
  for (const auto& bp : extract_boundary(s)) {
    const auto t = priority_terms(bp, s, map, obs, std::span(&tx, 1), cfg);
    REQUIRE(t.propagation.size() == 1);
    const double c = confidence_term(s, bp.coord, 5);
    const double d = data_term(map, s, bp, cfg);
    const double b = block_term(obs, tx, bp.coord, cfg);
    const double l = radio_term(tx, bp, cfg);
    CHECK(std::abs(t.value - c * d * b * l) <= 1e-9 * std::abs(c * d * b * l) + 1e-300);
    CHECK(t.value > 0.0);
  }
}

TEST_CASE("full mode needs a transmitter") {
  const RadioMap map = zero_map(6, 6);
  const RegionState s = init_region_state(map, Rect{2, 2, 2, 2});
  const auto b = extract_boundary(s);
  const ObstacleMap obs = ObstacleMap::empty(6, 6);
  CHECK_THROWS_AS(priority(b[0], s, map, obs, {}, cfg_with(3)), Error);
  PriorityConfig tex = cfg_with(3);
  tex.mode = PriorityMode::TextureOnly;
  CHECK_NOTHROW(priority(b[0], s, map, obs, {}, tex));
}

TEST_CASE("select_patch argmax and tie-break") {
  std::vector<BoundaryPoint> b{at(3, 1, Vec2(1, 0)), at(1, 5, Vec2(1, 0)), at(2, 2, Vec2(1, 0))};
  CHECK(select_patch(b, std::vector<double>{0.2, 0.9, 0.4}) == 1);
  CHECK(select_patch(b, std::vector<double>{0.5, 0.5, 0.5}) == 1);
  CHECK(select_patch(b, std::vector<double>{0.5, 0.1, 0.5}) == 2);
  CHECK_THROWS_AS(select_patch({}, std::vector<double>{}), Error);
}

TEST_CASE("select_patch matches full re-evaluation and ignores positive scaling") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> pos(2, 10);
  for (int t = 0; t < 30; ++t) {
    RadioMap map = zero_map(16, 16);
    map.values = (Grid::Random(16, 16).array() + 1.0) / 2.0;
    const RegionState s = init_region_state(map, Rect{pos(rng), pos(rng), 4, 5});
    ObstacleMap obs = ObstacleMap::empty(16, 16);
    obs.cells.block(0, pos(rng), 16, 2).setConstant(true);
    const Transmitter txs[] = {{Vec2(-3.0, pos(rng)), 0}, {Vec2(pos(rng), 20.0), 1}};
    const PriorityConfig cfg = cfg_with(5);
    const auto b = extract_boundary(s);
    std::vector<double> pr;
    for (const auto& bp : b) pr.push_back(priority(bp, s, map, obs, txs, cfg));
    const std::size_t got = select_patch(b, pr);

    std::size_t want = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double c = oracle::confidence(s, b[i].coord, 5);
      const double d = data_term(map, s, b[i], cfg);
      double sum = 0.0;
      for (const auto& tx : txs) sum += block_term(obs, tx, b[i].coord, cfg) * radio_term(tx, b[i], cfg);
      const double v = c * d * sum;
      CHECK(v == doctest::Approx(pr[i]).epsilon(1e-12));
      if (i == 0) continue;
      const double best = pr[want];
      if (v > best || (v == best && b[i].coord < b[want].coord)) want = i;
    }
    CHECK(got == want);

    std::vector<double> scaled = pr;
    for (auto& v : scaled) v *= 37.5;
    CHECK(select_patch(b, scaled) == got);
  }
}

TEST_CASE("equidistant boundary: distance unit does not move the argmax") {
  // transmitter at the centre of a ring of boundary cells at equal distance
  RadioMap map = zero_map(21, 21);
  map.values = (Grid::Random(21, 21).array() + 1.0) / 2.0;
  Mask m = Mask::Constant(21, 21, false);
  m(5, 10) = m(15, 10) = m(10, 5) = m(10, 15) = true;
  const RegionState s = init_region_state(map, m);
  const ObstacleMap obs = ObstacleMap::empty(21, 21);
  const Transmitter tx{Vec2(10, 10), 0};
  const auto b = extract_boundary(s);
  REQUIRE(b.size() == 4);
  PriorityConfig cfg = cfg_with(3);
  std::vector<double> p1, p2;
  for (const auto& bp : b) p1.push_back(priority(bp, s, map, obs, std::span(&tx, 1), cfg));
  cfg.beta = 3.0; // rescales every L by the same factor 5^-1
  for (const auto& bp : b) p2.push_back(priority(bp, s, map, obs, std::span(&tx, 1), cfg));
  CHECK(select_patch(b, p1) == select_patch(b, p2));
}
