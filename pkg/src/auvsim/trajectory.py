"""Per-tick trajectory log and its CSV round trip.

One row per physics tick (plus the initial state), with a fixed column
order.  Floats are written with shortest-round-trip precision, so reading
the CSV back reproduces every value exactly; two identical runs produce
byte-identical files.
"""

import numpy as np

from .errors import ScenarioError

# float columns before the fin block
_PREFIX = ["time", "x", "y", "z", "roll", "pitch", "yaw", "u", "v", "w", "p", "q", "r"]
# float columns after the fin block and the shaft speed
_SUFFIX = [
    "target",
    "target_heading",
    "target_speed",
    "altitude",
    "depth_meas",
    "heading_meas",
    "altitude_meas",
    "speed_meas",
]
_FLAGS = ["collision", "broach"]


def float_columns(n_fins):
    return _PREFIX + [f"fin_{i}" for i in range(n_fins)] + ["n"] + _SUFFIX


def csv_columns(n_fins):
    cols = float_columns(n_fins)
    # the mode string sits between the actuator block and the setpoint block
    at = cols.index("target")
    return cols[:at] + ["mode"] + cols[at:] + _FLAGS


class TrajectoryLog:
    """Column store for one simulation run."""

    def __init__(self, n_rows, n_fins):
        self.n_fins = n_fins
        self.float_cols = float_columns(n_fins)
        self.index = {name: i for i, name in enumerate(self.float_cols)}
        self.values = np.full((n_rows, len(self.float_cols)), np.nan)
        self.mode = np.empty(n_rows, dtype=object)
        self.mode[:] = "none"
        self.collision = np.zeros(n_rows, dtype=bool)
        self.broach = np.zeros(n_rows, dtype=bool)
        self.max_residual = 0.0

    @property
    def n_rows(self):
        return self.values.shape[0]

    def column(self, name):
        if name == "mode":
            return self.mode
        if name == "collision":
            return self.collision.astype(float)
        if name == "broach":
            return self.broach.astype(float)
        if name not in self.index:
            raise KeyError(name)
        return self.values[:, self.index[name]]

    def fin_deltas(self):
        base = self.index["fin_0"] if self.n_fins else None
        return self.values[:, base : base + self.n_fins] if self.n_fins else np.zeros((self.n_rows, 0))


def write_log(log, path):
    """Write the log as CSV with full float round-trip precision."""
    cols = csv_columns(log.n_fins)
    mode_at = cols.index("mode")
    lines = [",".join(cols)]
    for i in range(log.n_rows):
        floats = [repr(v) for v in log.values[i]]
        row = floats[:mode_at] + [log.mode[i]] + floats[mode_at:]
        row.append(str(int(log.collision[i])))
        row.append(str(int(log.broach[i])))
        lines.append(",".join(row))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise ScenarioError([f"{path}: cannot write log ({exc})"]) from exc


def read_log(path):
    """Read a CSV written by write_log back into a TrajectoryLog."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ScenarioError([f"{path}: cannot read log ({exc})"]) from exc
    if not lines:
        raise ScenarioError([f"{path}: empty log file"])
    header = lines[0].split(",")
    n_fins = sum(1 for name in header if name.startswith("fin_"))
    expected = csv_columns(n_fins)
    if header != expected:
        raise ScenarioError([f"{path}: unexpected log header"])
    mode_at = expected.index("mode")
    log = TrajectoryLog(len(lines) - 1, n_fins)
    for i, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != len(expected):
            raise ScenarioError([f"{path}: row {i + 1} has {len(parts)} fields"])
        log.mode[i] = parts[mode_at]
        floats = parts[:mode_at] + parts[mode_at + 1 : -2]
        log.values[i] = [float(tok) for tok in floats]
        log.collision[i] = parts[-2] == "1"
        log.broach[i] = parts[-1] == "1"
    return log
