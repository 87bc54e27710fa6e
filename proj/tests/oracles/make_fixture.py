#!/usr/bin/env python3
"""Writes the ingest fixture and its expected feature rows.

The expected rows are computed here without the C++ code: distances by the
spherical law of cosines, counts by direct scans of the event list.
Run from the repository root: python3 tests/oracles/make_fixture.py
"""

import math
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "fixture")
R_NM = 3440.065
APT = (33.6367, -84.4281)
ENTRY_NM, FINAL_NM = 100.0, 40.0
T0 = 1564660800  # 2019-08-01T12:00:00Z

# (id, callsign, type, [(dt, dlat, dlon, alt, gs), ...])
FLIGHTS = [
    ("F1", "DAL101", "MD88", [(1000, 1.80, 0.0, 24000, 430), (1740, 1.60, 0.0, 21000, 400),
                              (2300, 1.00, 0.0, 12000, 300), (2800, 0.50, 0.0, 5000, 200)]),
    ("F2", "DAL202", "B752", [(1300, -1.85, 0.10, 25000, 440), (1900, -1.55, 0.08, 22000, 410),
                              (2600, -0.45, 0.02, 4000, 190)]),
    ("F3", "AAL303", "A321", [(1500, 1.20, 1.60, 23000, 420), (2100, 1.10, 1.40, 20000, 395),
                              (3300, 0.30, 0.30, 3000, 170)]),
    ("F4", "SWA404", "B737", [(1800, 1.90, -0.30, 26000, 445), (2400, 1.62, -0.20, 23000, 415),
                              (2700, 1.30, -0.10, 19000, 380)]),
    ("F5", "UAL505", "A320", [(2000, 1.50, 0.0, 20000, 390), (2600, 0.80, 0.0, 9000, 260)]),
    ("F6", "DAL606", "CRJ9", [(8400, 1.90, 0.0, 24000, 400), (9000, 1.60, 0.0, 21000, 380)]),
    ("F7", "DAL707", "E175", [(1600, -1.40, -1.40, 24000, 410), (2100, -1.20, -1.20, 21000, 390),
                              (3000, -0.40, -0.40, 6000, 220)]),
]

EVENTS = [
    ("X1", -3000, "EV_RRT"), ("X2", -1500, "EV_LOOP"), ("X3", 200, "EV_LOOP"),
    ("X4", 900, "EV_RRT"), ("X5", 1100, "EV_GOA"), ("X6", 1200, "EV_LOOP"),
    ("X7", 1500, "EV_LOOP"), ("F1", 1740, "EV_LOOP"), ("X8", 1850, "EV_LOOP"),
    ("X9", 1890, "EV_RRT"), ("X3", 1950, "EV_HOLD"), ("X2", 2050, "EV_LOOP"),
    ("X5", 2099, "EV_GOA"), ("F1", 2950, "EV_LND"), ("F2", 3105, "EV_LND"),
    ("F7", 3400, "EV_LND"),
]

WEATHER = [
    ("2019-08-01T12:00:00Z", 9.5, 230, 2500, 10, 61),
    ("2019-08-01T13:00:00Z", 11.2, 240, 3200, 9, 58),
    ("2019-08-01T14:00:00Z", 7.8, 250, 4100, 10, 55),
]

COLUMNS = ["acType", "Latitude", "Longitude", "Altitude", "Distance", "Time", "Hour", "GroundSpeed",
           "AC_600s_ahead", "AC_1800s_ahead", "AC_3600s_ahead",
           "AC_600s_behind", "AC_1800s_behind", "AC_3600s_behind",
           "EV_RRT_600", "EV_RRT_1800", "EV_RRT_3600", "EV_LOOP_600", "EV_LOOP_1800", "EV_LOOP_3600",
           "EV_GOA_600", "EV_GOA_1800", "EV_GOA_3600",
           "windspeed", "winddir", "cloudcover", "visibility", "humidity"]


def cosine_distance_nm(lat1, lon1, lat2, lon2):
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dl = math.radians(lon2 - lon1)
    c = math.sin(p1) * math.sin(p2) + math.cos(p1) * math.cos(p2) * math.cos(dl)
    return R_NM * math.acos(max(-1.0, min(1.0, c)))


def fmt(v):
    if isinstance(v, str):
        return v
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def main():
    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "tracks.csv"), "w") as f:
        f.write("flight_id,callsign,ac_type,timestamp,lat,lon,alt_ft,gs_kt\n")
        for fid, cs, ac, pts in FLIGHTS:
            for dt, dlat, dlon, alt, gs in pts:
                f.write(f"{fid},{cs},{ac},{T0 + dt},{fmt(round(APT[0] + dlat, 6))},"
                        f"{fmt(round(APT[1] + dlon, 6))},{alt},{gs}\n")
    with open(os.path.join(OUT, "events.csv"), "w") as f:
        f.write("flight_id,timestamp,event_type\n")
        for fid, dt, ev in EVENTS:
            f.write(f"{fid},{T0 + dt},{ev}\n")
    with open(os.path.join(OUT, "weather.csv"), "w") as f:
        f.write("hour_iso,windspeed,winddir,cloudcover,visibility,humidity\n")
        for row in WEATHER:
            f.write(",".join(fmt(v) for v in row) + "\n")

    weather = {T0 + 3600 * i: row[1:] for i, row in enumerate(WEATHER)}

    crossings = {}
    for fid, cs, ac, pts in FLIGHTS:
        outside = False
        for dt, dlat, dlon, alt, gs in pts:
            lat, lon = round(APT[0] + dlat, 6), round(APT[1] + dlon, 6)
            d = cosine_distance_nm(lat, lon, *APT)
            if d > ENTRY_NM:
                outside = True
            elif outside:
                crossings[fid] = (T0 + dt, lat, lon, alt, gs, d)
                break

    rows, rejects = [], []
    for fid, cs, ac, pts in FLIGHTS:
        if fid not in crossings:
            rejects.append(fid)
            continue
        t, lat, lon, alt, gs, d = crossings[fid]
        bucket = math.floor((t + 1800) / 3600) * 3600
        if bucket not in weather:
            rejects.append(fid)
            continue
        others = [c[0] for k, c in crossings.items() if k != fid]
        v = [ac, lat, lon, alt, d, t, (bucket // 3600) % 24, gs]
        for w in (600, 1800, 3600):
            v.append(sum(1 for e in others if t - w <= e < t))
        for w in (600, 1800, 3600):
            v.append(sum(1 for e in others if t <= e <= t + w))
        for ev in ("EV_RRT", "EV_LOOP", "EV_GOA"):
            for w in (600, 1800, 3600):
                v.append(sum(1 for _, dt, name in EVENTS if name == ev and t - w <= T0 + dt < t))
        v.extend(weather[bucket])
        loop600 = v[COLUMNS.index("EV_LOOP_600")]
        stage = "I" if loop600 <= 10 else ("II" if loop600 <= 40 else "III")
        label = ""
        lands = [T0 + dt for f_id, dt, name in EVENTS if f_id == fid and name == "EV_LND"]
        if lands and min(lands) > t:
            label = min(lands) - t
        else:
            last = pts[-1]
            llat, llon = round(APT[0] + last[1], 6), round(APT[1] + last[2], 6)
            if T0 + last[0] > t and cosine_distance_nm(llat, llon, *APT) <= FINAL_NM:
                label = T0 + last[0] - t
        rows.append((t, fid, cs, v, stage, label))

    rows.sort(key=lambda r: (r[0], r[1]))
    with open(os.path.join(OUT, "features_expected.csv"), "w") as f:
        f.write("flight_id,callsign," + ",".join(COLUMNS) + ",stage,label_duration_s\n")
        for _, fid, cs, v, stage, label in rows:
            f.write(f"{fid},{cs}," + ",".join(fmt(x) for x in v) + f",{stage},{fmt(label)}\n")
    with open(os.path.join(OUT, "rejects_expected.txt"), "w") as f:
        f.write("\n".join(sorted(rejects)) + "\n")


if __name__ == "__main__":
    main()
