"""Run configuration and persisted reports.

A RunConfig round-trips losslessly between TOML/JSON dictionaries and the
dataclass. Reports are versioned JSON (schema_version major must match the
loader) plus flat CSV tables with documented headers; all writers format
floats with repr-precision so repeated runs produce byte-identical bodies.
No timestamps are ever written.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, ReportSchemaError

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

SCHEMA_VERSION = "1.0"

# documented safe ranges for tolerance overrides
_TOLERANCE_RANGES = {
    "involutivity": (1e-12, 1e-2),
    "rate_floor": (1e-9, 1.0),
    "min_drop": (0.0, 100.0),
    "det_product": (1e-14, 1.0),
    "domination_margin": (0.0, 0.5),
    "fd_step": (1e-7, 1e-2),
}

_DEFAULT_H_LIST = (1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4)


@dataclass(frozen=True)
class RunConfig:
    model: dict                      # {"name": ..., plus zoo parameters}
    points: int = 5
    seed: int = 7
    explicit_points: tuple | None = None
    k_max: int = 40
    k_grid: tuple = (10, 100, 1000)
    lyapunov_k: int = 2000
    h_list: tuple = _DEFAULT_H_LIST
    bracket_points: int | None = None
    tolerances: dict = field(default_factory=dict)
    out_dir: str = "runs/out"

    def __post_init__(self):
        if "name" not in self.model:
            raise ConfigError("config: [model] table is missing the 'name' field")
        if self.points < 1 and not self.explicit_points:
            raise ConfigError("config: need points >= 1 or an explicit point list")
        if self.k_max < 10:
            raise ConfigError("config: k_max must be >= 10")
        for key, val in self.tolerances.items():
            if key not in _TOLERANCE_RANGES:
                raise ConfigError(f"config: unknown tolerance override {key!r}")
            lo, hi = _TOLERANCE_RANGES[key]
            if not (lo <= float(val) <= hi):
                raise ConfigError(
                    f"config: tolerance {key}={val} outside safe range [{lo}, {hi}]")

    def tolerance(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))

    def sample_points(self, space) -> np.ndarray:
        if self.explicit_points:
            return np.array([space.canonicalize(p) for p in self.explicit_points])
        return np.array([space.canonicalize(p)
                         for p in space.random_points(self.points, self.seed)])

    def to_dict(self) -> dict:
        d = asdict(self)
        d["explicit_points"] = None if self.explicit_points is None else [
            list(map(float, p)) for p in self.explicit_points]
        d["k_grid"] = list(self.k_grid)
        d["h_list"] = [float(h) for h in self.h_list]
        return d

    @staticmethod
    def from_dict(d: dict) -> "RunConfig":
        d = dict(d)
        if "model" not in d:
            raise ConfigError("config: missing [model] table")
        ep = d.get("explicit_points")
        return RunConfig(
            model=dict(d["model"]),
            points=int(d.get("points", 5)),
            seed=int(d.get("seed", 7)),
            explicit_points=None if ep is None else tuple(tuple(map(float, p)) for p in ep),
            k_max=int(d.get("k_max", 40)),
            k_grid=tuple(int(k) for k in d.get("k_grid", (10, 100, 1000))),
            lyapunov_k=int(d.get("lyapunov_k", 2000)),
            h_list=tuple(float(h) for h in d.get("h_list", _DEFAULT_H_LIST)),
            bracket_points=(None if d.get("bracket_points") is None
                            else int(d["bracket_points"])),
            tolerances=dict(d.get("tolerances", {})),
            out_dir=str(d.get("out_dir", "runs/out")),
        )

    @staticmethod
    def from_toml(path) -> "RunConfig":
        with open(path, "rb") as fh:
            data = _toml.load(fh)
        if "model" not in data:
            raise ConfigError(f"{path}: missing [model] table")
        sampling = data.get("sampling", {})
        horizons = data.get("horizons", {})
        output = data.get("output", {})
        flat = {
            "model": data["model"],
            "points": sampling.get("count", 5),
            "seed": sampling.get("seed", 7),
            "explicit_points": sampling.get("points"),
            "k_max": horizons.get("k_max", 40),
            "k_grid": horizons.get("k_grid", (10, 100, 1000)),
            "lyapunov_k": horizons.get("lyapunov_k", 2000),
            "h_list": horizons.get("h_list", _DEFAULT_H_LIST),
            "bracket_points": sampling.get("bracket_points"),
            "tolerances": data.get("tolerances", {}),
            "out_dir": output.get("directory", "runs/out"),
        }
        return RunConfig.from_dict(flat)


@dataclass(frozen=True)
class RunReport:
    schema_version: str
    config: dict
    model_info: dict
    points: list      # per-point analysis dicts (JSON-ready)
    summary: dict

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "config": self.config,
            "model_info": self.model_info,
            "points": self.points,
            "summary": self.summary,
        }


def _jsonify(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def write_report(report: RunReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonify(report.to_dict()), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_report(path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    version = str(data.get("schema_version", ""))
    if version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise ReportSchemaError(
            f"unsupported report schema_version {version!r} "
            f"(loader supports major {SCHEMA_VERSION.split('.')[0]})")
    return data


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(str(c) if isinstance(c, (int, str)) else _fmt(c) for c in row)
                 for row in rows)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_star_csv(report: dict, path) -> None:
    """Columns: point_id,k,star_fwd,star_bwd (log second-order ratios per k)."""
    rows = []
    for pid, pt in enumerate(report["points"]):
        so = pt.get("second_order")
        if not so:
            continue
        for idx, (f, b) in enumerate(zip(so["fwd_log_ratios"], so["bwd_log_ratios"])):
            rows.append((pid, idx + 1, f, b))
    _write_csv(path, "point_id,k,star_fwd,star_bwd", rows)


def write_regularity_csv(report: dict, path) -> None:
    """Columns: point_id,k,l,growth_rate,exponent,deviation."""
    rows = []
    for pid, pt in enumerate(report["points"]):
        reg = pt.get("regularity")
        if not reg:
            continue
        for gi, k in enumerate(reg["k_grid"]):
            for li, (rate, dev) in enumerate(zip(reg["rates"][gi], reg["deviations"][gi])):
                rows.append((pid, int(k), li + 1, rate, reg["exponents"][li], dev))
    _write_csv(path, "point_id,k,l,growth_rate,exponent,deviation", rows)


def write_holonomy_csv(report: dict, path) -> None:
    """Columns: point_id,pair_i,pair_j,h,defect,normalized,transverse_normalized."""
    rows = []
    for pid, pt in enumerate(report["points"]):
        hol = pt.get("holonomy")
        if not hol:
            continue
        for rec in hol["records"]:
            rows.append((pid, rec["pair"][0], rec["pair"][1], rec["h"],
                         rec["defect"], rec["normalized"], rec["transverse_normalized"]))
    _write_csv(path, "point_id,pair_i,pair_j,h,defect,normalized,transverse_normalized", rows)


def write_brackets_csv(report: dict, path) -> None:
    """Columns: point_id,i,j,defect (projection defects |Pi [Y_i, Y_j]|)."""
    rows = []
    for pid, pt in enumerate(report["points"]):
        br = pt.get("brackets")
        if not br:
            continue
        defects = br["pair_defects"]
        d = len(defects)
        for i in range(d):
            for j in range(i + 1, d):
                rows.append((pid, i, j, defects[i][j]))
    _write_csv(path, "point_id,i,j,defect", rows)


def write_singulars_csv(report: dict, path) -> None:
    """Columns: point_id,subbundle,direction,k,i,log_singular_value.

    i follows the ordering convention of the direction (ascending forward,
    descending backward), 1-based.
    """
    rows = []
    for pid, pt in enumerate(report["points"]):
        seqs = pt.get("singular_sequences")
        if not seqs:
            continue
        for key in sorted(seqs):
            sub, direction = key.split(":")
            table = seqs[key]
            for ki, vals in enumerate(table):
                ordered = vals[::-1] if direction == "fwd" else vals
                for ii, val in enumerate(ordered):
                    rows.append((pid, sub, direction, ki + 1, ii + 1, val))
    _write_csv(path, "point_id,subbundle,direction,k,i,log_singular_value", rows)


def probe_to_dict(probe) -> dict:
    """JSON-ready view of a DynamicalBoundProbe (defects, ratios, constants)."""
    return {
        "point": probe.point.tolist(),
        "k": list(probe.ks),
        "defects": probe.defects.tolist(),
        "log_ratios": probe.log_ratios.tolist(),
        "constants": probe.constants.tolist(),
        "max_pairs": [list(p) for p in probe.max_pairs],
    }


def write_probe_csv(probe, path) -> None:
    """Columns: k,defect,log_ratio,constant.

    defect is the max adapted-frame pair defect D_k, log_ratio the log of
    s^k_d s^k_{d-1} / m(Dphi^k|_F) (kept in logs against underflow), constant
    their implied quotient K_k.
    """
    rows = [(int(k), d, lr, c) for k, d, lr, c in
            zip(probe.ks, probe.defects, probe.log_ratios, probe.constants)]
    _write_csv(path, "k,defect,log_ratio,constant", rows)


PLOTDATA_WRITERS = {
    "star": write_star_csv,
    "regularity": write_regularity_csv,
    "holonomy": write_holonomy_csv,
    "brackets": write_brackets_csv,
}


def emit_plotdata(report: dict, which: str, out_dir) -> Path:
    try:
        writer = PLOTDATA_WRITERS[which]
    except KeyError:
        raise ConfigError(
            f"unknown plotdata key {which!r}; valid keys: "
            f"{', '.join(sorted(PLOTDATA_WRITERS))}") from None
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{which}.csv"
    writer(report, path)
    return path
