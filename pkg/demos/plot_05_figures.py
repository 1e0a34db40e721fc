"""
Figures for the example curve
=============================

Writes the planar projection, the height profile and the length
convergence table of the example curve into ``heisgeo_figures/``.  This is
the same output as ``heisgeo plot --out heisgeo_figures``.
"""

from pathlib import Path

from heisgeo.cli import main

out = Path("heisgeo_figures")
main(["plot", "--out", str(out)])
print((out / "convergence.csv").read_text())
