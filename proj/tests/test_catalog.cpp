#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "scutinav/catalog.hpp"
#include "scutinav/text_io.hpp"
#include "support.hpp"

using namespace scutinav::catalog;
using testing_support::data_path;

namespace {

std::vector<StarEntry> table() { return load_catalog(data_path("table_b1.csv")); }

} // namespace

TEST(Catalog, TableHas66Rows) { EXPECT_EQ(table().size(), 66u); }

TEST(Catalog, NominalSelectionKeepsAll66) {
    const auto all = table();
    EXPECT_EQ(select_stars(all, {7.0, 0.04, 5.0}).size(), 66u);
}

TEST(Catalog, NothingBrighterThanZero) {
    const auto all = table();
    EXPECT_TRUE(select_stars(all, {0.0, 0.04, 5.0}).empty());
}

TEST(Catalog, SelectionIsIdempotent) {
    const auto all = table();
    const SelectionCriteria c{6.0, 0.1, 6.5};
    const auto once = select_stars(all, c);
    const auto twice = select_stars(once, c);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(once[i].name, twice[i].name);
}

TEST(Catalog, VwAriDroppedBySevenCyclesPerDay) {
    std::istringstream in("name, max_vmag, amplitude_vmag, period_days, ra_deg, dec_deg\n"
                          "VW Ari, 6.64, 0.120, 0.161, 40.0, 10.0\n");
    const auto rows = parse_catalog(in);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(select_stars(rows, {7.0, 0.04, 7.0}).empty());
    EXPECT_EQ(select_stars(rows, {7.0, 0.04, 6.0}).size(), 1u);
}

TEST(Catalog, XCaeFields) {
    const auto& x = find_star(table(), "X Cae");
    EXPECT_DOUBLE_EQ(x.max_vmag, 6.28);
    EXPECT_DOUBLE_EQ(x.amplitude_vmag, 0.100);
    EXPECT_DOUBLE_EQ(x.period_days, 0.135);
    EXPECT_DOUBLE_EQ(x.ra_deg, 76.109);
    EXPECT_DOUBLE_EQ(x.dec_deg, -35.705);
}

TEST(Catalog, EmptyInputGivesEmptyList) {
    std::istringstream in("");
    EXPECT_TRUE(parse_catalog(in).empty());
}

TEST(Catalog, InvariantViolationNamesEntry) {
    std::istringstream in("name, max_vmag, amplitude_vmag, period_days, ra_deg, dec_deg\n"
                          "Bad Star, 6.0, 0.1, 0.1, 10.0, 95.0\n");
    try {
        parse_catalog(in);
        FAIL() << "expected CatalogError";
    } catch (const CatalogError& e) {
        EXPECT_EQ(e.star(), "Bad Star");
    }
}

TEST(Catalog, MalformedRowReportsLine) {
    std::istringstream in("name, max_vmag, amplitude_vmag, period_days, ra_deg, dec_deg\n"
                          "A, 6.0, 0.1, 0.1, 10.0, 5.0\n"
                          "B, 6.0, x, 0.1, 10.0, 5.0\n");
    try {
        parse_catalog(in);
        FAIL() << "expected ParseError";
    } catch (const scutinav::ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Catalog, SaveLoadRoundTripIsExact) {
    const auto all = table();
    std::ostringstream out;
    write_catalog(out, all);
    std::istringstream in(out.str());
    const auto back = parse_catalog(in);
    ASSERT_EQ(back.size(), all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(back[i].name, all[i].name);
        EXPECT_EQ(back[i].max_vmag, all[i].max_vmag);
        EXPECT_EQ(back[i].amplitude_vmag, all[i].amplitude_vmag);
        EXPECT_EQ(back[i].period_days, all[i].period_days);
        EXPECT_EQ(back[i].ra_deg, all[i].ra_deg);
        EXPECT_EQ(back[i].dec_deg, all[i].dec_deg);
    }
}

TEST(LosVector, AxisCases) {
    const auto x = los_vector(0.0, 0.0);
    EXPECT_NEAR(x.x(), 1.0, 1e-15);
    EXPECT_NEAR(x.y(), 0.0, 1e-15);
    const auto y = los_vector(90.0, 0.0);
    EXPECT_NEAR(y.x(), 0.0, 1e-15);
    EXPECT_NEAR(y.y(), 1.0, 1e-15);
}

TEST(LosVector, XCaeHandTrig) {
    const double ra = 76.109 * M_PI / 180.0, dec = -35.705 * M_PI / 180.0;
    const auto u = los_vector(76.109, -35.705);
    EXPECT_NEAR(u.x(), std::cos(dec) * std::cos(ra), 1e-15);
    EXPECT_NEAR(u.y(), std::cos(dec) * std::sin(ra), 1e-15);
    EXPECT_NEAR(u.z(), std::sin(dec), 1e-15);
}

TEST(LosVector, UnitNormProperty) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ra(0.0, 360.0), dec(-90.0, 90.0);
    for (int i = 0; i < 1000; ++i) {
        const auto u = los_vector(ra(rng), dec(rng));
        EXPECT_LT(std::abs(u.vec().squaredNorm() - 1.0), 1e-12);
    }
}
