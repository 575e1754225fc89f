"""Regenerate the bundled MIESM and AMC tables.

MMIB curves use the usual J-function approximation of BICM mutual
information for QPSK/16QAM/64QAM. The Gaussian-fit parameters place the
50% BLER point slightly above the code rate, with a transition width that
shrinks as 1/sqrt(codeblock size). Both are representative, not measured.

    python tools/gen_tables.py
"""

import math
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "mmwsim" / "data"

# cqi: (modulation order, code rate x 1024, spectral efficiency)
CQI_LADDER = {
    1: (2, 78, 0.1523),
    2: (2, 120, 0.2344),
    3: (2, 193, 0.3770),
    4: (2, 308, 0.6016),
    5: (2, 449, 0.8770),
    6: (2, 602, 1.1758),
    7: (4, 378, 1.4766),
    8: (4, 490, 1.9141),
    9: (4, 616, 2.4063),
    10: (6, 466, 2.7305),
    11: (6, 567, 3.3223),
    12: (6, 666, 3.9023),
    13: (6, 772, 4.5234),
    14: (6, 873, 5.1152),
    15: (6, 948, 5.5547),
}
CB_CLASSES = (40, 104, 256, 512, 1024, 2048, 4096, 6144)


def J(x):
    if x <= 0:
        return 0.0
    if x < 1.6363:
        return -0.04210661 * x**3 + 0.209252 * x**2 - 0.00640081 * x
    if x > 10:
        return 1.0
    return 1 - math.exp(0.00181492 * x**3 - 0.142675 * x**2 - 0.0822054 * x + 0.0549608)


def mmib(q, snr):
    s = math.sqrt(snr)
    if q == 2:
        return J(2 * s)
    if q == 4:
        return 0.5 * J(0.8 * s) + 0.25 * J(2.17 * s) + 0.25 * J(0.965 * s)
    return (J(1.47 * s) + J(0.529 * s) + J(0.366 * s)) / 3


def main():
    lines = [
        "# MIESM link-to-system table",
        "# curve <modulation_order> starts a SINR->MMIB curve; rows: <sinr_db> <mmib>",
        "# fit <mcs> <modulation_order> <cb_size_class> <b> <c>",
    ]
    for q in (2, 4, 6):
        lines.append(f"curve {q}")
        prev = 0.0
        for i in range(-120, 201):
            snr_db = i * 0.25
            v = min(1.0, max(prev, mmib(q, 10 ** (snr_db / 10))))
            prev = v
            lines.append(f"{snr_db:.2f} {v:.8f}")
        lines.append("60.00 1.00000000")
    for cqi, (q, rate1024, _) in CQI_LADDER.items():
        r = rate1024 / 1024
        for n in CB_CLASSES:
            b = min(0.995, r + 0.5 / math.sqrt(n))
            c = 0.3 / math.sqrt(n)
            lines.append(f"fit {cqi} {q} {n} {b:.6f} {c:.6f}")
    (DATA / "miesm_default.txt").write_text("\n".join(lines) + "\n")

    amc = ["cqi,mcs,modulation_order,code_rate,spectral_efficiency"]
    for cqi, (q, rate1024, eff) in CQI_LADDER.items():
        amc.append(f"{cqi},{cqi},{q},{rate1024 / 1024:.6f},{eff}")
    (DATA / "amc_default.csv").write_text("\n".join(amc) + "\n")


if __name__ == "__main__":
    main()
