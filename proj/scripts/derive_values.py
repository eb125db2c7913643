#!/usr/bin/env python3
"""Direct evaluation of the pinned test vectors.

Each value is computed from the defining formula with plain float
arithmetic, independently of the C++ sources. The output is the list that
tests/test_pinned_values.cpp pins; run with --check to compare against the
values embedded in that file.
"""

import argparse
import math
import pathlib
import re
import sys

G = 9.81


def hll(h_l, u_l, h_r, u_r, g=G):
    c1 = min(u_l - math.sqrt(g * h_l), u_r - math.sqrt(g * h_r))
    c2 = max(u_l + math.sqrt(g * h_l), u_r + math.sqrt(g * h_r))
    f_l = (h_l * u_l, h_l * u_l * u_l + g * h_l * h_l / 2)
    f_r = (h_r * u_r, h_r * u_r * u_r + g * h_r * h_r / 2)
    if 0 < c1:
        return f_l
    if c2 < 0:
        return f_r
    u_lv = (h_l, h_l * u_l)
    u_rv = (h_r, h_r * u_r)
    return tuple((c2 * f_l[k] - c1 * f_r[k] + c1 * c2 * (u_rv[k] - u_lv[k])) / (c2 - c1) for k in range(2))


def derive():
    values = {}

    # Wave speeds for h = 1, u = 2 on both sides.
    values["wave_c1"] = 2 - math.sqrt(G)
    values["wave_c2"] = 2 + math.sqrt(G)

    # HLL middle branch, (hL, uL, hR, uR) = (1, 0, 2, 0).
    f_h, f_q = hll(1.0, 0.0, 2.0, 0.0)
    values["hll_mass"] = f_h
    values["hll_momentum"] = f_q

    # CFL step, 1D, u = 1, h = 1, dx = 0.1, n_cfl = 0.5.
    values["cfl_dt"] = 0.5 * 0.1 / (1.0 + math.sqrt(G * 1.0))

    # Semi-implicit Darcy-Weisbach divisor with h = 1, q = 1, f = 0.26, dt = 1.
    values["friction_1d"] = 1.0 / (1.0 + 1.0 * (0.26 / 8.0) * 1.0 / (1.0 * 1.0))
    q_norm = math.hypot(3.0, 4.0)
    divisor = 1.0 + 1.0 * (0.26 / 8.0) * q_norm / (1.0 * 1.0)
    values["friction_2d_x"] = 3.0 / divisor
    values["friction_2d_y"] = 4.0 / divisor

    # Green-Ampt capacity, Ks = 4.4e-6, hf = 0.06, dtheta = 0.12, V_inf = 1.2e-3, h_sur = 0.
    z_f = 1.2e-3 / 0.12
    values["green_ampt_capacity"] = 4.4e-6 * (1.0 + (0.06 - 0.0) / z_f)
    values["infiltration_rate"] = min(1.0, 1.0 * values["green_ampt_capacity"]) / 1.0

    # Velocity correction, u = 3, Du = 1, h = 2, faces 1.5 and 2.5, dx = 1.
    u, du, h, h_lo, h_hi, dx = 3.0, 1.0, 2.0, 1.5, 2.5, 1.0
    values["muscl_u_left"] = u - (h_hi / h) * (dx / 2) * du
    values["muscl_u_right"] = u + (h_lo / h) * (dx / 2) * du
    values["muscl_discharge"] = h_lo * values["muscl_u_left"] + h_hi * values["muscl_u_right"]

    # Topography sources.
    values["interface_source_a"] = (G / 2) * (1.0 ** 2 - 0.5 ** 2)
    values["interface_source_b"] = (G / 2) * (0.2 ** 2 - 0.0 ** 2)
    values["centered_source"] = -G * ((1.0 + 1.0) / 2) * (0.1 - 0.0)

    # Rain intensity of 70 mm/h in m/s.
    values["rain_70mm"] = 70.0 / 3.6e6

    # Normal-depth bed slope for uniform Darcy-Weisbach flow, q0 = 0.5, h = 1, f = 0.26.
    values["normal_depth_slope"] = -0.26 * 0.5 ** 2 / (8 * G * 1.0 ** 3)

    # Ritter fan value at the dam, h_left = 0.005.
    c0 = math.sqrt(G * 0.005)
    values["ritter_dam_h"] = 4 * 0.005 / 9
    values["ritter_dam_u"] = 2 * c0 / 3
    return values


def pinned(path):
    text = path.read_text()
    out = {}
    for name, literal in re.findall(r'pin\("([a-z0-9_]+)",\s*([-+0-9.eE]+)\)', text):
        out[name] = float(literal)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--check", type=pathlib.Path, help="pinned-value test source to compare against")
    args = parser.parse_args()
    values = derive()
    if args.check is None:
        for name, value in values.items():
            print(f"{name} = {value!r}")
        return 0
    found = pinned(args.check)
    bad = 0
    for name, value in values.items():
        if name not in found:
            print(f"missing {name}")
            bad += 1
        elif abs(found[name] - value) > 4 * math.ulp(value) + 1e-300:
            print(f"mismatch {name}: pinned {found[name]!r}, derived {value!r}")
            bad += 1
    print("ok" if bad == 0 else f"{bad} problem(s)")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
