#pragma once

// Carbon nanotube structure: chirality, diameter, chiral angle, pitch and
// electronic classification of a single-wall tube.

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "clachar/error.hpp"

namespace clachar::cnt {

inline constexpr double kDefaultCarbonBondNm = 0.142;

enum class ElectronicClass { Metallic, SmallBandGap, Semiconducting };
enum class StructureClass { Armchair, Zigzag, Chiral };

inline std::string_view to_string(ElectronicClass c) {
  switch (c) {
    case ElectronicClass::Metallic: return "Metallic";
    case ElectronicClass::SmallBandGap: return "SmallBandGap";
    case ElectronicClass::Semiconducting: return "Semiconducting";
  }
  return "?";
}

inline std::string_view to_string(StructureClass c) {
  switch (c) {
    case StructureClass::Armchair: return "Armchair";
    case StructureClass::Zigzag: return "Zigzag";
    case StructureClass::Chiral: return "Chiral";
  }
  return "?";
}

/// Roll-up vector (n, m) of a tube, stored in canonical form n >= m >= 0.
///
/// Construction swaps the indices when m > n; diameter and class do not
/// depend on orientation. (0, 0) is rejected.
class Chirality {
 public:
  Chirality(int n, int m) {
    if (n < 0 || m < 0) {
      throw ValidationError("chirality indices must be non-negative, got (" +
                            std::to_string(n) + "," + std::to_string(m) + ")");
    }
    if (n == 0 && m == 0) {
      throw ValidationError("chirality (0,0) is degenerate");
    }
    if (m > n) std::swap(n, m);
    n_ = n;
    m_ = m;
  }

  int n() const { return n_; }
  int m() const { return m_; }

  friend bool operator==(const Chirality&, const Chirality&) = default;

 private:
  int n_;
  int m_;
};

inline std::string to_string(const Chirality& ch) {
  return "(" + std::to_string(ch.n()) + "," + std::to_string(ch.m()) + ")";
}

/// Tube diameter in nm: (sqrt(3) * a_cc / pi) * sqrt(n^2 + n*m + m^2).
inline double diameter(const Chirality& ch, double a_cc_nm = kDefaultCarbonBondNm) {
  if (!(a_cc_nm > 0.0)) {
    throw ValidationError("carbon bond length must be positive");
  }
  const double n = ch.n();
  const double m = ch.m();
  const double lattice = std::numbers::sqrt3 * a_cc_nm;
  return lattice / std::numbers::pi * std::sqrt(n * n + n * m + m * m);
}

/// Chiral angle in degrees, 0 for zigzag (m = 0) and 30 for armchair (n = m).
inline double chiral_angle(const Chirality& ch) {
  if (ch.m() == 0) return 0.0;
  if (ch.n() == ch.m()) return 30.0;
  const double n = ch.n();
  const double m = ch.m();
  return std::atan(std::numbers::sqrt3 * m / (2.0 * n + m)) * 180.0 / std::numbers::pi;
}

inline ElectronicClass classify_electronic(const Chirality& ch) {
  if (ch.n() == ch.m()) return ElectronicClass::Metallic;
  if ((ch.n() - ch.m()) % 3 == 0) return ElectronicClass::SmallBandGap;
  return ElectronicClass::Semiconducting;
}

inline StructureClass classify_structure(const Chirality& ch) {
  if (ch.n() == ch.m()) return StructureClass::Armchair;
  if (ch.m() == 0) return StructureClass::Zigzag;
  return StructureClass::Chiral;
}

/// Center distance between adjacent tubes under one gate: (W_g - d) / (N - 1).
inline double pitch(double gate_width_nm, double diameter_nm, int tube_count) {
  if (tube_count < 2) {
    throw ValidationError("pitch needs at least 2 tubes, got " + std::to_string(tube_count));
  }
  if (!(gate_width_nm > diameter_nm)) {
    throw ValidationError("gate width must exceed tube diameter for a positive pitch");
  }
  return (gate_width_nm - diameter_nm) / (tube_count - 1);
}

struct CntGeometry {
  double diameter_nm;
  double chiral_angle_deg;
  double circumference_nm;
  ElectronicClass electronic_class;
  StructureClass structure_class;
};

inline CntGeometry geometry(const Chirality& ch, double a_cc_nm = kDefaultCarbonBondNm) {
  const double d = diameter(ch, a_cc_nm);
  return CntGeometry{d, chiral_angle(ch), std::numbers::pi * d, classify_electronic(ch),
                     classify_structure(ch)};
}

}  // namespace clachar::cnt
