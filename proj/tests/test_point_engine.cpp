#include <gtest/gtest.h>

#include <sstream>

#include "hoqmc/errors.hpp"
#include "hoqmc/point_engine.hpp"

using namespace hoqmc;

namespace {

GeneratingMatrixSet identity_set(int b, std::size_t n) {
  DigitMatrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1;
  return GeneratingMatrixSet(b, {I}, Provenance{});
}

// Radical inverse of h in base b, computed arithmetically.
double radical_inverse(std::uint64_t h, int b) {
  double v = 0.0;
  double scale = 1.0 / b;
  while (h) {
    v += static_cast<double>(h % static_cast<std::uint64_t>(b)) * scale;
    h /= static_cast<std::uint64_t>(b);
    scale /= b;
  }
  return v;
}

}  // namespace

TEST(DigitalPoint, VanDerCorputIndexTwo) {
  const auto p = digital_point(identity_set(2, 4), 2);
  EXPECT_EQ(std::vector<Digit>(p.coord(0).begin(), p.coord(0).end()), (std::vector<Digit>{0, 1, 0, 0}));
  EXPECT_EQ(p.value(0), 0.25);
  EXPECT_EQ(p.numerator(0), 4u);
}

TEST(DigitalPoint, VanDerCorputIndexThree) { EXPECT_EQ(digital_point(identity_set(2, 4), 3).value(0), 0.75); }

TEST(DigitalPoint, IndexZeroIsOrigin) {
  const auto M = interlaced_niederreiter(3, 2, 3, 4);
  const auto p = digital_point(M, 0);
  for (std::size_t j = 0; j < p.dims(); ++j) {
    for (auto d : p.coord(j)) EXPECT_EQ(d, 0);
  }
}

TEST(DigitalPoint, IndexBeyondColumnsRejected) {
  EXPECT_THROW(digital_point(identity_set(2, 3), 8), UsageError);
  EXPECT_NO_THROW(digital_point(identity_set(2, 3), 7));
}

TEST(NetPoints, VanDerCorputOrder) {
  const auto pts = net_points(identity_set(2, 2), 2);
  ASSERT_EQ(pts.size(), 4u);
  const double want[] = {0.0, 0.5, 0.25, 0.75};
  for (std::size_t h = 0; h < 4; ++h) EXPECT_EQ(pts[h].value(0), want[h]);
}

TEST(NetPoints, BaseThreeRadicalInverse) {
  const auto pts = net_points(identity_set(3, 1), 1);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0].numerator(0), 0u);
  EXPECT_EQ(pts[1].numerator(0), 1u);
  EXPECT_EQ(pts[2].numerator(0), 2u);
  for (int b : {2, 3, 5}) {
    const auto big = net_points(identity_set(b, 5), 5);
    for (std::uint64_t h = 0; h < big.size(); ++h) EXPECT_DOUBLE_EQ(big[h].value(0), radical_inverse(h, b));
  }
}

TEST(NetPoints, PrefixProperty) {
  for (int b : {2, 3}) {
    const std::size_t m_max = b == 2 ? 8 : 5;
    const auto M = interlaced_niederreiter(b, 2, 2, m_max);
    const auto full = net_points(M, m_max);
    for (std::size_t m = 1; m < m_max; ++m) {
      const auto part = net_points(M, m);
      for (std::size_t h = 0; h < part.size(); ++h) EXPECT_EQ(part[h], full[h]) << "b=" << b << " m=" << m;
    }
  }
}

TEST(NetPoints, ExtensibleInDimension) {
  const auto M4 = interlaced_niederreiter(2, 3, 4, 5);
  const auto all = net_points(M4, 5);
  for (std::size_t s = 1; s < 4; ++s) {
    const auto part = net_points(interlaced_niederreiter(2, 3, s, 5), 5);
    for (std::size_t h = 0; h < part.size(); ++h) {
      for (std::size_t j = 0; j < s; ++j) {
        EXPECT_TRUE(std::ranges::equal(part[h].coord(j), all[h].coord(j)));
      }
    }
  }
}

TEST(NetPoints, ThreadCountDoesNotChangeOutput) {
  const auto M = interlaced_niederreiter(3, 3, 2, 5);
  const auto one = net_points(M, 5, 1);
  for (unsigned t : {2u, 3u, 7u}) EXPECT_EQ(net_points(M, 5, t), one);
}

TEST(NetPoints, CoordinatesInUnitInterval) {
  for (const auto& p : net_points(interlaced_niederreiter(5, 2, 2, 3), 3)) {
    for (std::size_t j = 0; j < p.dims(); ++j) {
      EXPECT_GE(p.value(j), 0.0);
      EXPECT_LT(p.value(j), 1.0);
    }
  }
}

TEST(InterlacePoint, MergesLeadingDigits) {
  const std::vector<std::vector<Digit>> half_half{{1}, {1}};
  EXPECT_EQ(interlace_point(half_half), (std::vector<Digit>{1, 1}));
  const std::vector<std::vector<Digit>> xs{{1, 1}, {1, 0}};  // 3/4 and 1/2
  EXPECT_EQ(interlace_point(xs), (std::vector<Digit>{1, 1, 1, 0}));  // 7/8
  const std::vector<std::vector<Digit>> single{{0, 1, 1}};
  EXPECT_EQ(interlace_point(single), single.front());
}

TEST(InterlacePoint, MismatchedPrecisionRejected) {
  const std::vector<std::vector<Digit>> xs{{1, 0}, {1}};
  EXPECT_THROW(interlace_point(xs), UsageError);
  EXPECT_THROW(interlace_point(DigitPoint(2, 3, 2), 2), UsageError);
}

// Point-level interlacing of order-1 points equals generation from the
// interlaced matrices, digit for digit.
TEST(InterlacePoint, MatchesMatrixInterlacing) {
  for (int b : {2, 3}) {
    for (int d : {2, 3}) {
      for (std::size_t s : {1u, 2u}) {
        const std::size_t m = b == 2 ? 6 : 4;
        const auto src = niederreiter_set(b, static_cast<std::size_t>(d) * s, m, m);
        const auto inter = interlaced_niederreiter(b, d, s, m);
        const auto order1 = net_points(src, m);
        const auto direct = net_points(inter, m);
        for (std::size_t h = 0; h < order1.size(); ++h) {
          EXPECT_EQ(interlace_point(order1[h], d), direct[h]) << "b=" << b << " d=" << d << " s=" << s;
        }
      }
    }
  }
}

TEST(PointOutput, CsvDecimalsRule) {
  EXPECT_EQ(csv_decimals(2, 10), 6u);  // ceil(3.0103) + 2
  EXPECT_EQ(csv_decimals(3, 4), 4u);   // ceil(1.908) + 2
  EXPECT_EQ(csv_decimals(2, 0), 2u);
}

TEST(PointOutput, FormatCoordinateRoundsHalfUp) {
  const std::vector<Digit> three_eighths{0, 1, 1};  // 0.375
  EXPECT_EQ(format_coordinate(three_eighths, 2, 3), "0.375");
  EXPECT_EQ(format_coordinate(three_eighths, 2, 2), "0.38");
  const std::vector<Digit> third{1};  // 1/3 in base 3
  EXPECT_EQ(format_coordinate(third, 3, 4), "0.3333");
  const std::vector<Digit> two_thirds{2};
  EXPECT_EQ(format_coordinate(two_thirds, 3, 4), "0.6667");
}

TEST(PointOutput, CsvAndDigitsFormats) {
  const auto pts = net_points(identity_set(2, 2), 2);
  std::ostringstream csv;
  write_points(csv, pts, PointHeader{2, 1, 2, 1, "explicit"}, PointFormat::csv);
  EXPECT_EQ(csv.str(), "# hoqmc 0.3.0 b=2 s=1 m=2 d=1 construction=explicit\n0.000\n0.500\n0.250\n0.750\n");

  const auto M = interlaced_niederreiter(3, 1, 2, 1);
  std::ostringstream digits;
  write_points(digits, net_points(M, 1), PointHeader{3, 2, 1, 1, "niederreiter"}, PointFormat::digits);
  EXPECT_EQ(digits.str(), "# hoqmc 0.3.0 b=3 s=2 m=1 d=1 construction=niederreiter\n0|0\n1|1\n2|2\n");
  EXPECT_THROW(point_format_from_string("json"), UsageError);
}
