#include <buildseg/morphology.hpp>

#include "helpers.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

using namespace buildseg;

namespace {

bool subset(const BinaryMask& a, const BinaryMask& b) {
    for (std::size_t i = 0; i < a.pixels().size(); ++i)
        if (a.pixels()[i] && !b.pixels()[i]) return false;
    return true;
}

std::set<std::pair<int, int>> offset_set(const StructuringElement& se) {
    std::set<std::pair<int, int>> s;
    for (const Pixel& p : se.offsets()) s.insert({p.x, p.y});
    return s;
}

// Random dims in [1, max_dim] and ~50% fill.
BinaryMask arbitrary_mask(std::uint64_t seed, int max_dim) {
    const int w = 1 + static_cast<int>(rng::below(seed, 2, 0, max_dim));
    const int h = 1 + static_cast<int>(rng::below(seed, 2, 1, max_dim));
    return helpers::random_mask(seed, w, h);
}

} // namespace

TEST_CASE("make_se: square kernels") {
    const StructuringElement se = make_se(SeShape::square, 3);
    CHECK(se.offsets().size() == 9);
    CHECK(se.kernel_width() == 3);
    CHECK(se.kernel_height() == 3);
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            CHECK(se.contains(dx, dy));

    CHECK(make_se(SeShape::square, 1).offsets().size() == 1);
    CHECK(make_se(SeShape::square, 5).offsets().size() == 25);
}

TEST_CASE("make_se: disk kernels hold exactly the cells within the radius") {
    const StructuringElement d1 = make_se(SeShape::disk, 1);
    CHECK(offset_set(d1) ==
          std::set<std::pair<int, int>>{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}});

    const StructuringElement d2 = make_se(SeShape::disk, 2);
    CHECK(d2.offsets().size() == 13);
    for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
            CHECK(d2.contains(dx, dy) == (dx * dx + dy * dy <= 4));
}

TEST_CASE("make_se: line kernels") {
    const StructuringElement h = make_se(SeShape::line, 5, 0.0);
    CHECK(offset_set(h) ==
          std::set<std::pair<int, int>>{{-2, 0}, {-1, 0}, {0, 0}, {1, 0}, {2, 0}});

    const StructuringElement v = make_se(SeShape::line, 5, 90.0);
    CHECK(offset_set(v) ==
          std::set<std::pair<int, int>>{{0, -2}, {0, -1}, {0, 0}, {0, 1}, {0, 2}});

    const StructuringElement diag = make_se(SeShape::line, 5, 45.0);
    CHECK(offset_set(diag) ==
          std::set<std::pair<int, int>>{{-2, -2}, {-1, -1}, {0, 0}, {1, 1}, {2, 2}});

    const StructuringElement anti = make_se(SeShape::line, 3, 135.0);
    CHECK(offset_set(anti) == std::set<std::pair<int, int>>{{-1, 1}, {0, 0}, {1, -1}});

    // Line kernels are symmetric about the anchor (needed for flip equivariance).
    for (double angle : {0.0, 30.0, 45.0, 60.0, 90.0, 120.0, 135.0, 179.0}) {
        const StructuringElement se = make_se(SeShape::line, 7, angle);
        CHECK(se.offsets().size() == 7);
        for (const Pixel& p : se.offsets())
            CHECK(se.contains(-p.x, -p.y));
    }
}

TEST_CASE("make_se: invalid parameters") {
    CHECK_THROWS_AS(make_se(SeShape::square, 0), ConfigError);
    CHECK_THROWS_AS(make_se(SeShape::square, 4), ConfigError);
    CHECK_THROWS_AS(make_se(SeShape::line, 4, 0.0), ConfigError);
    CHECK_THROWS_AS(make_se(SeShape::line, 5, -1.0), ConfigError);
    CHECK_THROWS_AS(make_se(SeShape::line, 5, 180.0), ConfigError);
    CHECK_NOTHROW(make_se(SeShape::disk, 2));
}

TEST_CASE("erode: worked cases") {
    const StructuringElement sq3 = make_se(SeShape::square, 3);

    const BinaryMask full3(3, 3, true);
    const BinaryMask e = erode(full3, sq3);
    CHECK(e.count() == 1);
    CHECK(e.at(1, 1));

    const BinaryMask m = helpers::random_mask(7, 8, 6);
    CHECK(erode(m, make_se(SeShape::square, 1)) == m);
    CHECK(erode(BinaryMask(5, 5), sq3) == BinaryMask(5, 5));
}

TEST_CASE("dilate: worked cases") {
    const StructuringElement sq3 = make_se(SeShape::square, 3);

    BinaryMask center(5, 5);
    center.set(2, 2, true);
    const BinaryMask d = dilate(center, sq3);
    CHECK(d.count() == 9);
    for (int y = 1; y <= 3; ++y)
        for (int x = 1; x <= 3; ++x)
            CHECK(d.at(x, y));

    const BinaryMask m = helpers::random_mask(8, 8, 6);
    CHECK(dilate(m, make_se(SeShape::square, 1)) == m);
    CHECK(dilate(BinaryMask(4, 4, true), sq3) == BinaryMask(4, 4, true));
}

TEST_CASE("open and close: worked cases") {
    const StructuringElement sq3 = make_se(SeShape::square, 3);

    BinaryMask speck(5, 5);
    speck.set(2, 2, true);
    CHECK(open(speck, sq3) == BinaryMask(5, 5));

    BinaryMask ring(3, 3, true);
    ring.set(1, 1, false);
    CHECK(close(ring, sq3) == BinaryMask(3, 3, true));

    CHECK(open(BinaryMask(4, 4), sq3) == BinaryMask(4, 4));
    CHECK(close(BinaryMask(4, 4, true), sq3) == BinaryMask(4, 4, true));
}

TEST_CASE("erode/dilate match the brute-force oracle") {
    const std::vector<StructuringElement> ses = {
        make_se(SeShape::square, 3),     make_se(SeShape::square, 5),
        make_se(SeShape::disk, 1),       make_se(SeShape::disk, 2),
        make_se(SeShape::line, 5, 0.0),  make_se(SeShape::line, 5, 45.0),
        make_se(SeShape::line, 5, 90.0), make_se(SeShape::line, 3, 135.0),
    };
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const BinaryMask m = arbitrary_mask(seed, 20);
        for (const auto& se : ses) {
            CHECK(erode(m, se) == oracles::erode(m, se));
            CHECK(dilate(m, se) == oracles::dilate(m, se));
        }
    }
}

TEST_CASE("morphology algebra on random masks") {
    const std::vector<StructuringElement> ses = {
        make_se(SeShape::square, 3),
        make_se(SeShape::disk, 2),
        make_se(SeShape::line, 5, 45.0),
    };
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const BinaryMask m = arbitrary_mask(seed, 24);
        for (const auto& se : ses) {
            const BinaryMask o = open(m, se);
            const BinaryMask c = close(m, se);
            CHECK(subset(o, m));   // anti-extensive
            CHECK(subset(m, c));   // extensive
            CHECK(open(o, se) == o);   // idempotent
            CHECK(close(c, se) == c);  // idempotent

            // Monotonicity on a nested pair.
            BinaryMask bigger = m;
            const BinaryMask extra = arbitrary_mask(seed + 1000, 24);
            for (int y = 0; y < m.height(); ++y)
                for (int x = 0; x < m.width(); ++x)
                    if (extra.at(x % extra.width(), y % extra.height()))
                        bigger.set(x, y, true);
            CHECK(subset(erode(m, se), erode(bigger, se)));
            CHECK(subset(dilate(m, se), dilate(bigger, se)));
        }
    }
}

TEST_CASE("connected_components: adjacency rules") {
    const BinaryMask diag = helpers::make_mask({
        "#.",
        ".#",
    });
    CHECK(connected_components(diag, 4).component_count() == 2);
    CHECK(connected_components(diag, 8).component_count() == 1);
    CHECK(connected_components(BinaryMask(3, 3), 8).component_count() == 0);
}

TEST_CASE("connected_components: labels are dense and scan-ordered") {
    const BinaryMask m = helpers::make_mask({
        "#..#.#",
        "#..#..",
        "......",
        ".##...",
    });
    const LabelMap lm = connected_components(m, 4);
    REQUIRE(lm.component_count() == 4);
    CHECK(lm.at(0, 0) == 1);
    CHECK(lm.at(3, 0) == 2);
    CHECK(lm.at(5, 0) == 3);
    CHECK(lm.at(0, 1) == 1);
    CHECK(lm.at(1, 3) == 4);
    CHECK(lm.at(2, 3) == 4);
    CHECK(lm.at(2, 2) == 0);
}

TEST_CASE("connected_components match the flood-fill oracle") {
    for (std::uint64_t seed = 300; seed < 340; ++seed) {
        const BinaryMask m = arbitrary_mask(seed, 24);
        for (int conn : {4, 8}) {
            const LabelMap lib = connected_components(m, conn);
            const LabelMap ref = oracles::connected_components(m, conn);
            CHECK(lib.component_count() == ref.component_count());
            CHECK(lib.labels() == ref.labels());
        }
    }
}

TEST_CASE("component_pixels partitions the foreground") {
    const BinaryMask m = helpers::random_mask(55, 15, 11, 400);
    const LabelMap lm = connected_components(m, 8);
    const auto comps = component_pixels(lm);
    REQUIRE(static_cast<int>(comps.size()) == lm.component_count());
    std::int64_t total = 0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        CHECK_FALSE(comps[i].empty());
        for (const Pixel& p : comps[i])
            CHECK(lm.at(p.x, p.y) == static_cast<int>(i) + 1);
        total += static_cast<std::int64_t>(comps[i].size());
    }
    CHECK(total == m.count());
}

TEST_CASE("boundary_band: worked cases") {
    const BinaryMask full4(4, 4, true);
    const BinaryMask band = boundary_band(full4, 1);
    CHECK(band.count() == 12);
    CHECK_FALSE(band.at(1, 1));
    CHECK_FALSE(band.at(2, 2));
    CHECK(band.at(0, 0));
    CHECK(band.at(3, 2));

    CHECK(boundary_band(full4, 6) == full4);  // d beyond the diagonal

    BinaryMask single(3, 3);
    single.set(1, 1, true);
    CHECK(boundary_band(single, 1) == single);

    CHECK_THROWS_AS(boundary_band(full4, 0), ConfigError);
}

TEST_CASE("distance transform and bands match the pair-scan oracle") {
    for (std::uint64_t seed = 400; seed < 430; ++seed) {
        const BinaryMask m = arbitrary_mask(seed, 16);
        CHECK(detail::squared_distance_to_background(m) ==
              oracles::squared_distance_to_background(m));
        for (int d : {1, 2, 3, 5}) {
            CHECK(boundary_band(m, d) == oracles::boundary_band(m, d));
        }
    }
}

TEST_CASE("band equals mask minus disk erosion") {
    // boundary_band(m, d) == m AND NOT erode(m, disk(d)): the disk kernel
    // holds exactly the offsets with squared norm <= d*d, so a pixel
    // survives erosion iff its distance to background exceeds d.
    for (std::uint64_t seed = 500; seed < 525; ++seed) {
        const BinaryMask m = arbitrary_mask(seed, 16);
        for (int d : {1, 2, 3}) {
            const BinaryMask band = boundary_band(m, d);
            const BinaryMask core = erode(m, make_se(SeShape::disk, d));
            BinaryMask expect(m.width(), m.height());
            for (int y = 0; y < m.height(); ++y)
                for (int x = 0; x < m.width(); ++x)
                    expect.set(x, y, m.at(x, y) && !core.at(x, y));
            CHECK(band == expect);
        }
    }
}
