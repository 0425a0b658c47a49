"""Output emission: delimited curves, JSON report streams, SVG plots.

Numbers are serialized with 12 significant digits and a '.' decimal
separator regardless of locale, and every file is written to a temp file
in the target directory first and renamed into place, so a crashed run
never leaves a partial artifact behind.
"""

import json
import math
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

BOUNDS_HEADER = ["scenario", "series", "x_name", "x", "y_name", "y", "order"]
TS_HEADER = BOUNDS_HEADER + ["confidence"]
ED_HEADER = ["n1", "log_m1_bits", "n2_shell", "n2_asymptotic", "eps_sic1_opt"]


@dataclass(frozen=True)
class CurveRecord:
    scenario: str
    series: str
    x_name: str
    x: float
    y_name: str
    y: float
    order: str
    confidence: Optional[str] = None

    def __post_init__(self):
        if not math.isfinite(self.y):
            raise ValueError(
                f"series {self.series!r} produced a non-finite y at "
                f"{self.x_name}={self.x}"
            )

    def row(self, with_confidence: bool = False) -> List:
        out = [self.scenario, self.series, self.x_name, self.x,
               self.y_name, self.y, self.order]
        if with_confidence:
            out.append(self.confidence or "ok")
        return out


def fmt_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "%.12g" % v
    return str(v)


def _atomic_write(path: str, write_fn):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            write_fn(f)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]):
    def emit(f):
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt_cell(v) for v in row) + "\n")
    _atomic_write(path, emit)


def write_ndjson(path: str, records: Iterable[dict]):
    def emit(f):
        for rec in records:
            f.write(json.dumps(rec) + "\n")
    _atomic_write(path, emit)


def render_svg(path: str, records: Sequence[CurveRecord], title: str):
    """Static plot of curve records, one panel per y_name."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    y_names = []
    for r in records:
        if r.y_name not in y_names:
            y_names.append(r.y_name)
    if not y_names:
        raise ValueError("nothing to plot")
    fig, axes = plt.subplots(
        len(y_names), 1, figsize=(7.0, 4.0 * len(y_names)), squeeze=False)
    for ax, y_name in zip(axes[:, 0], y_names):
        sub = [r for r in records if r.y_name == y_name]
        series = []
        for r in sub:
            if r.series not in series:
                series.append(r.series)
        xs_all = [r.x for r in sub]
        logx = (min(xs_all) > 0 and max(xs_all) / min(xs_all) >= 8.0)
        for name in series:
            pts = [(r.x, r.y) for r in sub if r.series == name]
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    marker="o", markersize=3, label=name)
        if logx:
            ax.set_xscale("log", base=2)
        ax.set_xlabel(sub[0].x_name)
        ax.set_ylabel(y_name)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    axes[0, 0].set_title(title)
    fig.tight_layout()
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    os.close(fd)
    try:
        fig.savefig(tmp, format="svg")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)
