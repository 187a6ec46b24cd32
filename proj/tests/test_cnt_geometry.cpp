#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "clachar/cnt_geometry.hpp"

using namespace clachar;
using namespace clachar::cnt;

namespace {

// Angle between the chiral vector n*a1 + m*a2 and the zigzag axis a1, from
// the dot product in the hexagonal basis (|a1| = |a2|, a1.a2 = 1/2).
double angle_from_lattice_vectors(int n, int m) {
  const double dot = n + 0.5 * m;
  const double norm = std::sqrt(static_cast<double>(n) * n + static_cast<double>(n) * m + static_cast<double>(m) * m);
  return std::acos(dot / norm) * 180.0 / std::numbers::pi;
}

// The three rules written out literally: equal indices, difference a
// multiple of three, or neither.
ElectronicClass brute_force_class(int n, int m) {
  if (n == m) return ElectronicClass::Metallic;
  const int diff = n - m;
  for (int i = -31; i <= 31; ++i) {
    if (diff == 3 * i) return ElectronicClass::SmallBandGap;
  }
  return ElectronicClass::Semiconducting;
}

}  // namespace

TEST(Chirality, RejectsDegenerateAndNegative) {
  EXPECT_THROW(Chirality(0, 0), ValidationError);
  EXPECT_THROW(Chirality(-1, 2), ValidationError);
}

TEST(Chirality, SwapsIntoCanonicalOrder) {
  Chirality ch(3, 6);
  EXPECT_EQ(ch.n(), 6);
  EXPECT_EQ(ch.m(), 3);
  EXPECT_EQ(ch, Chirality(6, 3));
}

TEST(Diameter, ChosenZigzagTube) { EXPECT_NEAR(diameter(Chirality(17, 0)), 1.331, 5e-4); }

TEST(Diameter, Zigzag19) { EXPECT_NEAR(diameter(Chirality(19, 0), 0.142), 1.4875, 1e-4); }

TEST(Diameter, RejectsNonPositiveBond) { EXPECT_THROW(diameter(Chirality(17, 0), 0.0), ValidationError); }

TEST(Diameter, OrientationInvariantAndMonotoneInLatticeNorm) {
  struct Entry {
    int key;
    double d;
  };
  std::vector<Entry> all;
  for (int n = 0; n <= 30; ++n) {
    for (int m = 0; m <= 30; ++m) {
      if (n == 0 && m == 0) continue;
      EXPECT_EQ(diameter(Chirality(n, m)), diameter(Chirality(m, n)));
      all.push_back({n * n + n * m + m * m, diameter(Chirality(n, m))});
    }
  }
  for (const auto& a : all) {
    for (const auto& b : all) {
      if (a.key < b.key) {
        EXPECT_LT(a.d, b.d);
      }
      if (a.key == b.key) {
        EXPECT_EQ(a.d, b.d);
      }
    }
  }
}

TEST(ChiralAngle, ArmchairAndZigzagAreExact) {
  for (int n = 1; n <= 30; ++n) {
    EXPECT_EQ(chiral_angle(Chirality(n, n)), 30.0);
    EXPECT_EQ(chiral_angle(Chirality(n, 0)), 0.0);
  }
}

TEST(ChiralAngle, ChiralTube) { EXPECT_NEAR(chiral_angle(Chirality(6, 3)), 19.107, 1e-3); }

TEST(ChiralAngle, MatchesLatticeGeometryAndStaysInRange) {
  for (int n = 1; n <= 30; ++n) {
    for (int m = 0; m <= n; ++m) {
      const double theta = chiral_angle(Chirality(n, m));
      EXPECT_GE(theta, 0.0);
      EXPECT_LE(theta, 30.0);
      EXPECT_NEAR(theta, angle_from_lattice_vectors(n, m), 1e-9) << n << "," << m;
      EXPECT_EQ(theta == 0.0, m == 0);
      EXPECT_EQ(theta == 30.0, n == m);
    }
  }
}

TEST(Classify, ThreeRules) {
  EXPECT_EQ(classify_electronic(Chirality(5, 5)), ElectronicClass::Metallic);
  EXPECT_EQ(classify_electronic(Chirality(17, 0)), ElectronicClass::Semiconducting);
  EXPECT_EQ(classify_electronic(Chirality(15, 0)), ElectronicClass::SmallBandGap);
}

TEST(Classify, AgreesWithBruteForceTable) {
  for (int n = 0; n <= 30; ++n) {
    for (int m = 0; m <= 30; ++m) {
      if (n == 0 && m == 0) continue;
      const Chirality ch(n, m);
      EXPECT_EQ(classify_electronic(ch), brute_force_class(ch.n(), ch.m())) << n << "," << m;
    }
  }
}

TEST(Classify, StructureFollowsAngle) {
  for (int n = 1; n <= 30; ++n) {
    for (int m = 0; m <= n; ++m) {
      const auto g = geometry(Chirality(n, m));
      EXPECT_EQ(g.structure_class == StructureClass::Armchair, g.chiral_angle_deg == 30.0);
      EXPECT_EQ(g.structure_class == StructureClass::Zigzag, g.chiral_angle_deg == 0.0);
    }
  }
}

TEST(Geometry, CircumferenceIsPiTimesDiameter) {
  for (int n = 1; n <= 30; ++n) {
    for (int m = 0; m <= n; ++m) {
      const auto g = geometry(Chirality(n, m));
      EXPECT_LT(std::abs(g.circumference_nm - std::numbers::pi * g.diameter_nm) / g.circumference_nm, 1e-12);
    }
  }
}

TEST(Pitch, DefaultGate) {
  EXPECT_NEAR(pitch(32.0, 1.33, 9), 3.834, 1e-3);
  EXPECT_NEAR(pitch(32.0, 1.331, 9), 3.834, 1e-3);
}

TEST(Pitch, Errors) {
  EXPECT_THROW(pitch(32.0, 1.33, 1), ValidationError);
  EXPECT_THROW(pitch(32.0, 32.0, 9), ValidationError);
  EXPECT_THROW(pitch(10.0, 32.0, 9), ValidationError);
}
