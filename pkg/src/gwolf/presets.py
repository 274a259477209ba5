"""Named experiment presets shared by the CLI and the verification suite."""

import math

# distribution presets: coefficient a, leader triple, frozen position x
DIST_PRESETS = {
    "fig4a": {"a": 2.0, "p": (1.0, 1.0, 1.0), "x": 3.0},
    "fig4b": {"a": 2.0, "p": (1.0, 1.0, 1.0), "x": 0.5},
    "fig4c": {"a": 0.5, "p": (1.0, 1.0, 1.0), "x": 3.0},
    "fig4d": {"a": 0.5, "p": (1.0, 1.0, 1.0), "x": 0.5},
    "fig6a": {"a": 2.0, "p": (0.43, 1.74, 2.70), "x": 0.83},
    "fig6b": {"a": 2.0, "p": (-0.18, -0.97, -1.31), "x": -0.22},
    "fig6c": {"a": 2.0, "p": (0.57, 0.86, -1.56), "x": 0.72},
    "fig6d": {"a": 2.0, "p": (0.65, 1.13, -2.89), "x": 0.90},
    "fig6e": {"a": 2.0, "p": (0.09, -1.07, 2.88), "x": 2.08},
    "fig6f": {"a": 2.0, "p": (0.56, -1.85, -0.34), "x": -3.14},
    "fig6g": {"a": 2.0, "p": (-0.30, 0.96, 2.24), "x": -2.87},
    "fig6h": {"a": 2.0, "p": (0.22, 0.55, 0.18), "x": 3.11},
    "fig8": {"a": 2.0, "p": (1.0, 1.0, 1.0), "x": 3.0},
}

# expected number of plateau-branch factors per distribution preset row
PLATEAU_COUNTS = {
    "fig6a": 0, "fig6b": 0, "fig6c": 1, "fig6d": 1,
    "fig6e": 2, "fig6f": 2, "fig6g": 3, "fig6h": 3,
}


def spread_triple(p0):
    """Symmetric leader triple (-s, 0, s) with the requested spread constant.

    p0 = (4/9) sum(p^2) - (1/9)(sum p)^2 reduces to (8/9) s^2 here, so
    s = sqrt(9 p0 / 8).
    """
    s = math.sqrt(9.0 * p0 / 8.0)
    return (-s, 0.0, s)


TABLE2_T_VALUES = (20, 30, 50, 100, 200, 500)

# moment/stagnation presets: leader triple, horizon, uniform init range
MOMENT_PRESETS = {
    "fig9": {"p": (-1.0, 1.5, 2.5), "T": 60, "init": (-4.0, 4.0),
             "hist_ts": (2, 5, 10, 20, 30, 50), "bins": 80},
    "fig11a": {"p": spread_triple(2.20), "T": 50, "init": (-4.0, 4.0)},
    "fig11b": {"p": spread_triple(1.41), "T": 50, "init": (-4.0, 4.0)},
    "table2": {"p": spread_triple(2.20), "T": 50, "init": (-4.0, 4.0),
               "t_list": TABLE2_T_VALUES},
}

# fixed leader triples for the stability checks
STABILITY_TRIPLES = (
    (-1.0, 1.5, 2.5),
    (0.4, -0.8, 1.9),
    (2.0, 2.2, -0.7),
    (-2.5, 0.3, 0.9),
)
