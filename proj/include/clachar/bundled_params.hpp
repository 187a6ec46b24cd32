#pragma once

// Default parameter files compiled into the library. Kept byte-identical to
// params/*.params (checked by the test suite).

namespace clachar::bundled {

inline constexpr const char* kSiParams = R"PARAMS(# Silicon 32 nm bulk MOSFET, minimum-size devices, switch-level defaults.
# Engineering values chosen for ordering-level studies; not measured data.

[SiN]
r_on_ohm = 12000
c_gate_f = 6.0e-17
i_off_a  = 2.0e-8
v_th_v   = 0.29

[SiP]
r_on_ohm = 26000
c_gate_f = 6.0e-17
i_off_a  = 1.5e-8
v_th_v   = 0.27

[wire]
c_wire_f = 1.5e-17
)PARAMS";

inline constexpr const char* kCntParams = R"PARAMS(# CNFET, (17,0) tubes. r_on_ohm and c_gate_f are per tube (c_gate_f at k_ox = 16);
# the device value divides r_on by the tube count and multiplies c_gate by it.
# Thresholds follow from the tube diameter.

[CntN]
r_on_ohm = 90000
c_gate_f = 3.0e-18
i_off_a  = 1.0e-10

[CntP]
r_on_ohm = 85000
c_gate_f = 3.0e-18
i_off_a  = 1.0e-10

[wire]
c_wire_f = 1.5e-17
)PARAMS";

inline constexpr const char* kHybridParams = R"PARAMS(# Hybrid: silicon nMOS pull-down devices with p-type CNFET pull-up devices.
# Values match si.params [SiN] and cnt.params [CntP].

[SiN]
r_on_ohm = 12000
c_gate_f = 6.0e-17
i_off_a  = 2.0e-8
v_th_v   = 0.29

[CntP]
r_on_ohm = 85000
c_gate_f = 3.0e-18
i_off_a  = 1.0e-10

[wire]
c_wire_f = 1.5e-17
)PARAMS";

}  // namespace clachar::bundled
