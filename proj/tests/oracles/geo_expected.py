#!/usr/bin/env python3
"""Reference WGS-84 geodetic -> ECEF -> ENU chain, written independently of the
C++ implementation. Produces the frozen expected values used by the ENU unit
tests, plus a study of how much precision survives a round trip through
decimal-degree doubles (which bounds what the GNSS identity tests may assert).

Run:  python3 tests/oracles/geo_expected.py
"""
import math

import numpy as np

A = 6378137.0
F = 1.0 / 298.257223563
E2 = F * (2.0 - F)


def geodetic_to_ecef(lat, lon, h):
    n = A / math.sqrt(1.0 - E2 * math.sin(lat) ** 2)
    x = (n + h) * math.cos(lat) * math.cos(lon)
    y = (n + h) * math.cos(lat) * math.sin(lon)
    z = (n * (1.0 - E2) + h) * math.sin(lat)
    return np.array([x, y, z])


def enu_rotation(lat, lon):
    sl, cl = math.sin(lat), math.cos(lat)
    so, co = math.sin(lon), math.cos(lon)
    return np.array([
        [-so, co, 0.0],
        [-sl * co, -sl * so, cl],
        [cl * co, cl * so, sl],
    ])


def geodetic_to_enu(lat, lon, h, lat0, lon0, h0):
    d = geodetic_to_ecef(lat, lon, h) - geodetic_to_ecef(lat0, lon0, h0)
    return enu_rotation(lat0, lon0) @ d


def ecef_to_geodetic(x, y, z):
    # Bowring's method with fixed-point refinement.
    lon = math.atan2(y, x)
    p = math.hypot(x, y)
    b = A * (1.0 - F)
    ep2 = (A * A - b * b) / (b * b)
    th = math.atan2(A * z, b * p)
    lat = math.atan2(z + ep2 * b * math.sin(th) ** 3,
                     p - E2 * A * math.cos(th) ** 3)
    for _ in range(5):
        n = A / math.sqrt(1.0 - E2 * math.sin(lat) ** 2)
        h = p / math.cos(lat) - n
        lat = math.atan2(z, p * (1.0 - E2 * n / (n + h)))
    n = A / math.sqrt(1.0 - E2 * math.sin(lat) ** 2)
    h = p / math.cos(lat) - n
    return lat, lon, h


def main():
    lat0 = math.radians(46.78)
    lon0 = math.radians(-71.28)
    h0 = 98.0

    print("== frozen expected values ==")
    e, n, u = geodetic_to_enu(lat0 + 1e-5, lon0, h0, lat0, lon0, h0)
    print(f"north-offset-1e-5rad @46.78deg: e={e:.12e} n={n:.15f} u={u:.15f}")

    e2, n2, u2 = geodetic_to_enu(lat0, lon0, h0 + 5.0, lat0, lon0, h0)
    print(f"height+5m: e={e2:.6e} n={n2:.6e} u={u2:.15f}")

    # Round trip of the inverse against the forward map.
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(2000):
        enu = rng.uniform(-1000, 1000, 3)
        enu[2] = rng.uniform(-50, 50)
        ecef0 = geodetic_to_ecef(lat0, lon0, h0)
        ecef = ecef0 + enu_rotation(lat0, lon0).T @ enu
        lat, lon, h = ecef_to_geodetic(*ecef)
        back = geodetic_to_enu(lat, lon, h, lat0, lon0, h0)
        worst = max(worst, float(np.linalg.norm(back - enu)))
    print(f"closed-form inverse round-trip worst error: {worst:.3e} m")

    # Degree-double quantization: the GNSS CSV schema stores decimal degrees,
    # so the best any inverse can land is limited by the ulp of lat/lon
    # expressed in degrees. This bounds GNSS identity assertions.
    ulp_lat_m = np.spacing(46.78) * math.pi / 180.0 * 6.37e6
    ulp_lon_m = np.spacing(71.28) * math.pi / 180.0 * 6.39e6 * math.cos(lat0)
    print(f"ulp(lat_deg) ~= {ulp_lat_m:.3e} m, ulp(lon_deg) ~= {ulp_lon_m:.3e} m")

    worst_q = 0.0
    for _ in range(20000):
        enu = rng.uniform(-8000, 8000, 3)
        enu[2] = rng.uniform(-5, 5)
        ecef = geodetic_to_ecef(lat0, lon0, h0) + enu_rotation(lat0, lon0).T @ enu
        lat, lon, h = ecef_to_geodetic(*ecef)
        # snap through decimal degrees exactly like the CSV schema does
        latd = math.degrees(lat)
        lond = math.degrees(lon)
        back = geodetic_to_enu(math.radians(latd), math.radians(lond), h,
                               lat0, lon0, h0)
        worst_q = max(worst_q, float(np.linalg.norm(back - enu)))
    print(f"degree-double round-trip worst error: {worst_q:.3e} m")


if __name__ == "__main__":
    main()
