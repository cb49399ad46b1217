"""Static figure generation from solver run artifacts.

Every script reads the plain CSV/JSON artifacts of a pipeline run and
renders one figure family; no numerical computation happens here beyond
plotting transforms (rotations, subsampling).  Entry point:

    python -m figures.make_all --run-dir <run> --out-dir <dir>
"""
