"""Regenerate oracle_frozen.json from the floating-point lattice oracle.

The exact code never runs here: the file pins what the independent
summation produces, so later changes to either side are caught.
"""
import json
from pathlib import Path

from ellrecip.eisenstein import TorsionIndex
from ellrecip.oracle import lattice_oracle

TAUS = [[0.0, 1.0], [0.05, 0.2]]

F_CASES = [  # k, L, a, b
    (4, 1, 0, 0), (3, 5, 1, 2), (1, 5, 1, 2), (1, 5, 0, 2),
    (2, 2, 1, 1), (4, 2, 1, 0), (3, 5, 0, 1), (2, 5, 2, 3),
]
E_CASES = [  # k, s, L, a, b, lift
    (1, 1, 5, 1, 2, None), (2, 1, 3, 0, 1, None), (3, 1, 5, 2, 1, None),
    (1, 1, 5, 1, 2, 6), (1, 1, 2, 0, 1, 2), (2, 2, 5, 1, 2, None), (4, 1, 3, 1, 1, None),
]


def main():
    out = []
    for re_, im in TAUS:
        tau = complex(re_, im)
        for k, L, a, b in F_CASES:
            v = lattice_oracle("F", k, 1, TorsionIndex(L, a, b), tau)
            out.append({"kind": "F", "k": k, "s": 1, "L": L, "a": a, "b": b, "lift": None,
                        "tau": [re_, im], "value": [v.real, v.imag]})
        for k, s, L, a, b, lift in E_CASES:
            v = lattice_oracle("E", k, s, TorsionIndex(L, a, b), tau, lift=lift)
            out.append({"kind": "E", "k": k, "s": s, "L": L, "a": a, "b": b, "lift": lift,
                        "tau": [re_, im], "value": [v.real, v.imag]})
    path = Path(__file__).with_name("oracle_frozen.json")
    path.write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
