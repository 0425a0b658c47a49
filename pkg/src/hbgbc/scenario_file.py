"""Scenario files: TOML ingestion and validation for the CLI.

A scenario file is the reproducibility artifact: channel gains, power
budget, blocklengths, error targets, sweep ranges, and per-tool settings
all live in one human-editable document with explicit units in the key
names.  Unknown keys are rejected by name so typos cannot silently drop
a setting.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import tomli

from .scenario import ChannelScenario, check_order

KINDS = ("bounds", "ed", "verify", "timesharing")
FAMILIES = ("sato_het", "sato_hom", "single_user_1", "single_user_2")
CHECKS = ("sic1_density", "rx1_density", "coop_density", "dt_decoder",
          "error_decomposition")


def _fail(where: str, msg: str):
    raise ValueError(f"{where}: {msg}")


def _pop(sec: dict, where: str, key: str, kind, required: bool = False,
         default=None):
    if key not in sec:
        if required:
            _fail(where, f"missing required key '{key}'")
        return default
    v = sec.pop(key)
    if kind is float:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            _fail(where, f"'{key}' must be a number, got {v!r}")
        return float(v)
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, int):
            _fail(where, f"'{key}' must be an integer, got {v!r}")
        return v
    if kind is bool:
        if not isinstance(v, bool):
            _fail(where, f"'{key}' must be true/false, got {v!r}")
        return v
    if kind is str:
        if not isinstance(v, str):
            _fail(where, f"'{key}' must be a string, got {v!r}")
        return v
    if kind is list:
        if not isinstance(v, list):
            _fail(where, f"'{key}' must be a list, got {v!r}")
        return v
    raise AssertionError(kind)


def _done(sec: dict, where: str):
    if sec:
        _fail(where, f"unknown keys: {sorted(sec)}")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: Optional[int]
    step: Optional[float]
    spacing: str

    def values(self) -> List[int]:
        """Integer sweep values, deduplicated, in order."""
        if self.step is not None:
            vals, v = [], self.start
            while v <= self.stop + 1e-9:
                vals.append(v)
                v += self.step
        elif self.spacing == "log":
            n = self.points
            r = (self.stop / self.start) ** (1.0 / (n - 1)) if n > 1 else 1.0
            vals = [self.start * r**i for i in range(n)]
        else:
            n = self.points
            h = (self.stop - self.start) / (n - 1) if n > 1 else 0.0
            vals = [self.start + h * i for i in range(n)]
        out, seen = [], set()
        for v in vals:
            iv = max(1, int(round(v)))
            if iv not in seen:
                seen.add(iv)
                out.append(iv)
        return out


@dataclass(frozen=True)
class RunSpec:
    """One fully validated scenario file."""
    kind: str
    scenario_id: str
    seed: int
    order: str
    h1: float
    h2: float
    power_sum: Optional[float]
    power_pair: Optional[Tuple[float, float]]
    eps_total: Optional[float]
    eps_pair: Optional[Tuple[float, float]]
    n1: Optional[int]
    n2: Optional[int]
    ratio: Optional[float]
    sweep: Optional[SweepSpec]
    families: Tuple[str, ...] = ()
    delta_fraction: float = 0.05
    include_log_k: bool = False
    alpha_step: float = 0.05
    ts_blocklengths: Tuple[int, ...] = ()
    mc: dict = field(default_factory=dict)
    out_csv: Optional[str] = None
    out_svg: Optional[str] = None

    @property
    def eps(self) -> float:
        if self.eps_total is not None:
            return self.eps_total
        return self.eps_pair[0] + self.eps_pair[1]

    def n2_for(self, n1: int) -> int:
        if self.ratio is not None:
            return min(n1, max(1, int(round(self.ratio * n1))))
        if self.n2 is not None:
            return self.n2
        return n1

    def scenario_for(self, n1: int, n2: Optional[int] = None,
                     prefer: str = "any") -> ChannelScenario:
        """Build a ChannelScenario at the given blocklengths.

        prefer picks the power mode when the file carries both (verify
        files may): "split", "sum", or "any" (split wins).
        """
        if n2 is None:
            n2 = self.n2_for(n1)
        kw = dict(h1=self.h1, h2=self.h2, n1=n1, n2=n2, eps=self.eps)
        use_split = self.power_pair is not None and prefer in ("split", "any")
        if prefer == "sum" and self.power_sum is None:
            _fail(self.scenario_id, "this run needs [power] power_sum")
        if prefer == "split" and self.power_pair is None:
            _fail(self.scenario_id,
                  "this run needs [power] power_user1 and power_user2")
        if use_split:
            kw["power_1"], kw["power_2"] = self.power_pair
        else:
            kw["power_sum"] = self.power_sum
        return ChannelScenario(**kw)

    def base_scenario(self, prefer: str = "any") -> ChannelScenario:
        if self.n1 is None:
            _fail(self.scenario_id, "[blocklength] n1 is required here")
        return self.scenario_for(self.n1, prefer=prefer)


def _parse_mc(sec: dict, default_seed: int) -> dict:
    where = "[mc]"
    out = {
        "trials": _pop(sec, where, "trials", int, required=True),
        "seed": _pop(sec, where, "seed", int, default=default_seed),
        "n1": _pop(sec, where, "n1", int, required=True),
        "n2": _pop(sec, where, "n2", int, required=True),
        "confidence_sigmas": _pop(sec, where, "confidence_sigmas", float,
                                  default=4.0),
        "rho": _pop(sec, where, "rho", float, default=0.5),
    }
    checks = _pop(sec, where, "checks", list, default=list(CHECKS))
    for c in checks:
        if c not in CHECKS:
            _fail(where, f"unknown check {c!r}; valid: {list(CHECKS)}")
    out["checks"] = tuple(checks)
    for sub in ("dt", "decomp"):
        subsec = sec.pop(sub, {})
        w = f"[mc.{sub}]"
        if not isinstance(subsec, dict):
            _fail(where, f"'{sub}' must be a table")
        cfg = {
            "n1": _pop(subsec, w, "n1", int, default=out["n1"]),
            "n2": _pop(subsec, w, "n2", int, default=out["n2"]),
            "trials": _pop(subsec, w, "trials", int, default=out["trials"]),
        }
        if sub == "dt":
            cfg["messages"] = _pop(subsec, w, "messages", int, default=16)
        else:
            cfg["messages_1"] = _pop(subsec, w, "messages_1", int, default=8)
            cfg["messages_2"] = _pop(subsec, w, "messages_2", int, default=4)
        _done(subsec, w)
        out[sub] = cfg
    _done(sec, where)
    return out


def load_run(path: str) -> RunSpec:
    """Parse and validate one scenario file."""
    with open(path, "rb") as f:
        doc = tomli.load(f)
    return parse_run(doc, where=path)


def parse_run(doc: dict, where: str = "scenario") -> RunSpec:
    doc = dict(doc)
    kind = _pop(doc, where, "kind", str, required=True)
    if kind not in KINDS:
        _fail(where, f"kind must be one of {list(KINDS)}, got {kind!r}")
    scenario_id = _pop(doc, where, "id", str, required=True)
    seed = _pop(doc, where, "seed", int, default=0)
    order = check_order(_pop(doc, where, "order", str, default="halflogn"))

    ch = doc.pop("channel", None)
    if not isinstance(ch, dict):
        _fail(where, "missing [channel] table")
    h1 = _pop(ch, "[channel]", "gain_1", float, required=True)
    h2 = _pop(ch, "[channel]", "gain_2", float, required=True)
    _done(ch, "[channel]")

    pw = doc.pop("power", None)
    if not isinstance(pw, dict):
        _fail(where, "missing [power] table")
    power_sum = _pop(pw, "[power]", "power_sum", float)
    p1 = _pop(pw, "[power]", "power_user1", float)
    p2 = _pop(pw, "[power]", "power_user2", float)
    _done(pw, "[power]")
    if (p1 is None) != (p2 is None):
        _fail("[power]", "power_user1 and power_user2 must come together")
    power_pair = (p1, p2) if p1 is not None else None
    if power_sum is None and power_pair is None:
        _fail("[power]", "need power_sum or the power_user1/power_user2 pair")
    if power_sum is not None and power_pair is not None and kind != "verify":
        _fail("[power]", "both power modes at once is only meaningful for "
              "kind = 'verify'")

    er = doc.pop("error", None)
    if not isinstance(er, dict):
        _fail(where, "missing [error] table")
    eps_total = _pop(er, "[error]", "eps_total", float)
    e1 = _pop(er, "[error]", "eps_user1", float)
    e2 = _pop(er, "[error]", "eps_user2", float)
    _done(er, "[error]")
    if (e1 is None) != (e2 is None):
        _fail("[error]", "eps_user1 and eps_user2 must come together")
    eps_pair = (e1, e2) if e1 is not None else None
    if eps_total is None and eps_pair is None:
        _fail("[error]", "need eps_total or the eps_user1/eps_user2 pair")
    if eps_total is not None and eps_pair is not None:
        _fail("[error]", "give one error form, not both")

    n1 = n2 = ratio = None
    bl = doc.pop("blocklength", None)
    if bl is not None:
        if not isinstance(bl, dict):
            _fail(where, "[blocklength] must be a table")
        n1 = _pop(bl, "[blocklength]", "n1", int)
        n2 = _pop(bl, "[blocklength]", "n2", int)
        ratio = _pop(bl, "[blocklength]", "ratio", float)
        _done(bl, "[blocklength]")
        if n2 is not None and ratio is not None:
            _fail("[blocklength]", "give n2 or ratio, not both")
        if ratio is not None and not (0.0 < ratio <= 1.0):
            _fail("[blocklength]", f"ratio must be in (0, 1], got {ratio}")

    sweep = None
    sw = doc.pop("sweep", None)
    if sw is not None:
        if not isinstance(sw, dict):
            _fail(where, "[sweep] must be a table")
        variable = _pop(sw, "[sweep]", "variable", str, default="n1")
        if variable != "n1":
            _fail("[sweep]", f"only 'n1' sweeps are supported, got {variable!r}")
        start = _pop(sw, "[sweep]", "start", float, required=True)
        stop = _pop(sw, "[sweep]", "stop", float, required=True)
        points = _pop(sw, "[sweep]", "points", int)
        step = _pop(sw, "[sweep]", "step", float)
        spacing = _pop(sw, "[sweep]", "spacing", str, default="linear")
        _done(sw, "[sweep]")
        if spacing not in ("linear", "log"):
            _fail("[sweep]", f"spacing must be linear or log, got {spacing!r}")
        if (points is None) == (step is None):
            _fail("[sweep]", "give exactly one of points or step")
        if points is not None and points < 1:
            _fail("[sweep]", f"points must be >= 1, got {points}")
        if step is not None and step <= 0:
            _fail("[sweep]", f"step must be > 0, got {step}")
        if not (0 < start <= stop):
            _fail("[sweep]", f"need 0 < start <= stop, got ({start}, {stop})")
        if spacing == "log" and step is not None:
            _fail("[sweep]", "log spacing wants points, not step")
        sweep = SweepSpec(variable=variable, start=start, stop=stop,
                          points=points, step=step, spacing=spacing)

    families: Tuple[str, ...] = ()
    bd = doc.pop("bounds", None)
    if bd is not None:
        if not isinstance(bd, dict):
            _fail(where, "[bounds] must be a table")
        fams = _pop(bd, "[bounds]", "families", list,
                    default=["sato_het", "sato_hom"])
        _done(bd, "[bounds]")
        for fam in fams:
            if fam not in FAMILIES:
                _fail("[bounds]", f"unknown family {fam!r}; valid: "
                      f"{list(FAMILIES)}")
        families = tuple(fams)
    elif kind == "bounds":
        families = ("sato_het", "sato_hom")

    delta_fraction, include_log_k = 0.05, False
    ed = doc.pop("early_decoding", None)
    if ed is not None:
        if not isinstance(ed, dict):
            _fail(where, "[early_decoding] must be a table")
        delta_fraction = _pop(ed, "[early_decoding]", "delta_fraction", float,
                              default=0.05)
        include_log_k = _pop(ed, "[early_decoding]", "include_log_k", bool,
                             default=False)
        _done(ed, "[early_decoding]")
        if not (0.0 < delta_fraction < 1.0):
            _fail("[early_decoding]",
                  f"delta_fraction must be in (0, 1), got {delta_fraction}")

    alpha_step, ts_blocklengths = 0.05, ()
    ts = doc.pop("timesharing", None)
    if ts is not None:
        if not isinstance(ts, dict):
            _fail(where, "[timesharing] must be a table")
        alpha_step = _pop(ts, "[timesharing]", "alpha_step", float, default=0.05)
        bls = _pop(ts, "[timesharing]", "blocklengths", list, required=True)
        _done(ts, "[timesharing]")
        if not (0.0 < alpha_step <= 0.5):
            _fail("[timesharing]",
                  f"alpha_step must be in (0, 0.5], got {alpha_step}")
        for n in bls:
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                _fail("[timesharing]", f"blocklengths must be integers >= 1, "
                      f"got {n!r}")
        ts_blocklengths = tuple(bls)
    elif kind == "timesharing":
        _fail(where, "kind = 'timesharing' needs a [timesharing] table")

    mc: dict = {}
    mcsec = doc.pop("mc", None)
    if mcsec is not None:
        if not isinstance(mcsec, dict):
            _fail(where, "[mc] must be a table")
        mc = _parse_mc(mcsec, seed)
    elif kind == "verify":
        _fail(where, "kind = 'verify' needs an [mc] table")

    out_csv = out_svg = None
    out = doc.pop("output", None)
    if out is not None:
        if not isinstance(out, dict):
            _fail(where, "[output] must be a table")
        out_csv = _pop(out, "[output]", "csv", str)
        out_svg = _pop(out, "[output]", "svg", str)
        _done(out, "[output]")

    _done(doc, where)

    if kind in ("bounds", "timesharing") and eps_pair is not None:
        _fail("[error]", f"kind = '{kind}' uses the single eps_total form")
    if kind == "ed":
        if power_pair is None:
            _fail("[power]", "kind = 'ed' needs the per-user power pair")
        if eps_pair is None:
            _fail("[error]", "kind = 'ed' needs the per-user error pair")
    if kind in ("bounds", "ed") and n1 is None and sweep is None:
        _fail(where, f"kind = '{kind}' needs [blocklength] n1 or a [sweep]")

    return RunSpec(
        kind=kind, scenario_id=scenario_id, seed=seed, order=order,
        h1=h1, h2=h2, power_sum=power_sum, power_pair=power_pair,
        eps_total=eps_total, eps_pair=eps_pair,
        n1=n1, n2=n2, ratio=ratio, sweep=sweep, families=families,
        delta_fraction=delta_fraction, include_log_k=include_log_k,
        alpha_step=alpha_step, ts_blocklengths=ts_blocklengths,
        mc=mc, out_csv=out_csv, out_svg=out_svg,
    )
