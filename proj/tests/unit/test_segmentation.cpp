#include "sivae/segmentation.hpp"

#include <doctest.h>

using namespace sivae;

TEST_SUITE("segmentation") {
  TEST_CASE("cell lookup on a 2 x 2 grid") {
    const auto g = SegmentGrid::cells({0, 10, 0, 10}, 2, 2);
    CHECK(g.cell_count() == 4);
    CHECK(g.cell_of(0, 0) == 0);
    CHECK(g.cell_of(5, 0) == 1);  // half-open on the left edge of cell 1
    CHECK(g.cell_of(4.999, 5) == 2);
    CHECK(g.cell_of(10, 10) == 3);  // closed outer edge
    CHECK_FALSE(g.cell_of(10.01, 3).has_value());
    CHECK_FALSE(g.cell_of(-0.01, 3).has_value());
  }

  TEST_CASE("grid parsing and cell size") {
    const Domain2D dom{0, 100, 0, 100};
    const auto g = SegmentGrid::parse(dom, "20x20");
    CHECK(g.nx == 20);
    CHECK(g.ny == 20);
    CHECK(SegmentGrid::parse(dom, "4X5").ny == 5);
    CHECK_THROWS_AS(SegmentGrid::parse(dom, "20"), std::invalid_argument);
    CHECK_THROWS_AS(SegmentGrid::parse(dom, "0x3"), std::invalid_argument);

    const auto c = SegmentGrid::cell_size({0, 25, 0, 10}, 10.0);
    CHECK(c.nx == 3);
    CHECK(c.ny == 1);
    CHECK(c.domain.x_max == doctest::Approx(30.0));
    CHECK(c.cell_of(24.9, 9.0) == 2);
    CHECK_THROWS_AS(SegmentGrid::cell_size({0, 1, 0, 1}, 0.0), std::invalid_argument);
  }

  TEST_CASE("empty cells are dropped and one-hot rows have a single one") {
    Matrix loc(4, 2);
    loc << 1, 1, 9, 9, 2, 2, 9, 1;
    const auto enc = encode_segments(loc, SegmentGrid::cells({0, 10, 0, 10}, 2, 2));
    CHECK(enc.kept_cells == std::vector<int>{0, 1, 3});
    CHECK(enc.segment == std::vector<int>{0, 2, 0, 1});
    const Matrix u = enc.one_hot();
    CHECK(u.rows() == 4);
    CHECK(u.cols() == 3);
    CHECK((u.rowwise().sum().array() == 1.0).all());
    CHECK(u(1, 2) == 1.0);
  }

  TEST_CASE("every observation lands in exactly one kept cell") {
    const Matrix loc = sample_uniform_locations(5000, {}, 3);
    const auto enc = encode_segments(loc, SegmentGrid::parse({}, "20x20"));
    CHECK(enc.m() <= 400);
    CHECK(enc.m() > 390);
    std::vector<int> counts(static_cast<std::size_t>(enc.m()), 0);
    for (int s : enc.segment) ++counts[static_cast<std::size_t>(s)];
    for (int c : counts) CHECK(c > 0);
  }

  TEST_CASE("outside locations are reported with their row") {
    Matrix loc(2, 2);
    loc << 1, 1, 11, 1;
    CHECK_THROWS_WITH_AS(encode_segments(loc, SegmentGrid::cells({0, 10, 0, 10}, 2, 2)), doctest::Contains("row 1"),
                         std::invalid_argument);
  }

  TEST_CASE("encoding against a stored layout") {
    Matrix loc(2, 2);
    loc << 1, 1, 9, 9;
    const auto g = SegmentGrid::cells({0, 10, 0, 10}, 2, 2);
    const auto enc = encode_with_layout(loc, g, {0, 3});
    CHECK(enc.segment == std::vector<int>{0, 1});
    Matrix other(1, 2);
    other << 9, 1;
    CHECK_THROWS_AS(encode_with_layout(other, g, {0, 3}), std::invalid_argument);
  }

  TEST_CASE("bounding domain") {
    Matrix loc(3, 2);
    loc << 1, 5, -2, 7, 4, 6;
    const auto d = bounding_domain(loc);
    CHECK(d.x_min == -2);
    CHECK(d.x_max == 4);
    CHECK(d.y_min == 5);
    CHECK(d.y_max == 7);
  }
}
