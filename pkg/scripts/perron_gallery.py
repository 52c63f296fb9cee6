#!/usr/bin/env python3
"""Perron tree gallery: union areas across levels and a geometry dump."""

import os
import sys

from nilmax import nikodym as nk


def run(out_dir: str) -> int:
    print("pi/8 sector, unit height:")
    for n in (0, 1, 2, 4, 6):
        tree = nk.perron_tree(n, (3.14159265 / 8, 3.14159265 / 4))
        print(f"  level {n}: union area {tree.union_area:.4f} "
              f"({tree.union_area / tree.base_area:.3f} x base)")
    os.makedirs(out_dir, exist_ok=True)
    approx = nk.nikodym_approx(128, 0.025)
    path = os.path.join(out_dir, "nikodym_geometry.json")
    nk.approx_to_json(approx, path)
    res = nk.verify_assignment(approx, 2000, seed=0)
    print(f"N=128 eta=0.025: level {approx.level}, raw area "
          f"{approx.raw_area:.4f}, area(E) {approx.area_E:.4f}, "
          f"area(F) {approx.area_F:.3g}")
    print(f"verification: {res['failures']} failures on "
          f"{res['n_checked']} points -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "out"))
