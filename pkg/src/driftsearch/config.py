"""Scenario description and its ``[section]`` / ``key = value`` text format.

Example::

    [domain]
    x_min = 0
    x_max = 400
    y_min = 0
    y_max = 200

    [flow]
    kind = double_gyre
    length = 200
    amplitude = 3

    [splash]
    polygon = 150 60; 250 60; 250 140; 150 140
    t0_hours = 0.5

    [schedule]
    days = 5, 6, 7
    agents = 10, 10, 10
    window_start_hour = 14
    window_end_hour = 17

Repeat ``[splash.<name>]`` sections for several splash regions. Flow
parameters depend on ``kind``; ``kind = file`` takes ``path`` to an OVF1
file instead.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .flow import ANALYTIC_FLOWS
from .grid import Domain

CONTROLLERS = ("mdsmc", "dsmc", "lawnmower_reported", "lawnmower_drifted")


class ConfigError(ConfigurationError):
    def __init__(self, message, line=None, path=None, key=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip())
        self.line = line
        self.message = message
        self.key = key     # offending setting, so the parser can report its line


Polygon = tuple  # tuple of (x, y) float pairs


@dataclass(frozen=True)
class SplashSpec:
    polygon: Polygon
    t0_hours: float = 0.0
    name: str = ""


@dataclass(frozen=True)
class SearchDay:
    """One search window: ``day`` counts whole days after the splash day (day 0)."""

    day: int
    agents: int
    start_hour: float = 14.0
    end_hour: float = 17.0
    reported: Polygon | None = None

    def window(self, delay_days: float = 0.0):
        base = 24.0 * (self.day + delay_days)
        return base + self.start_hour, base + self.end_hour


@dataclass(frozen=True)
class FlowSpec:
    kind: str = "double_gyre"
    params: tuple = ()          # sorted (name, value) pairs
    path: str | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    domain: Domain
    splash: tuple
    days: tuple
    flow: FlowSpec = FlowSpec()
    controller: str = "mdsmc"
    speed_kmh: float = 380.0
    lawnmower_spacing_km: float = 3.0
    sigma_km: float = 3.0
    radius_km: float = 1.5
    expected_time_s: float = 2.0
    beta_mdsmc: float = -0.5
    beta_dsmc: float = -1.5
    modes: int = 32
    nx: int = 128
    ny: int = 128
    bandwidth_km: float = 3.0
    control_dt_s: float = 60.0
    budget_window_h: float = 1.0
    effort_scale: float | None = None
    n_tracers: int = 10000
    n_targets: int = 1000
    n_runs: int = 100
    seed: int = 0
    start_delay_days: float = 0.0
    tol_km: float = 1e-6
    trajectories: str = "first"

    def __post_init__(self):
        validate(self)

    @property
    def sweep_rate(self) -> float:
        """Factor turning smoothed agent-hours/km^2 into dimensionless search effort.

        The default makes one straight pass deposit, on its centre line,
        the exposure ``dwell / T`` the stochastic sensor would see there:
        ``2 r sqrt(2 pi) sigma / T``.
        """
        if self.effort_scale is not None:
            return self.effort_scale
        return 2.0 * self.radius_km * math.sqrt(2.0 * math.pi) * self.sigma_km \
            / (self.expected_time_s / 3600.0)

    @property
    def beta(self) -> float:
        return self.beta_dsmc if self.controller == "dsmc" else self.beta_mdsmc

    def windows(self):
        return [d.window(self.start_delay_days) for d in self.days]

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def validate(cfg: ScenarioConfig):
    if cfg.controller not in CONTROLLERS:
        raise ConfigError(f"controller must be one of {', '.join(CONTROLLERS)}", key="controller")
    for name in ("speed_kmh", "lawnmower_spacing_km", "sigma_km", "radius_km", "expected_time_s",
                 "bandwidth_km", "control_dt_s", "budget_window_h", "tol_km"):
        if not getattr(cfg, name) > 0:
            raise ConfigError(f"{name} must be positive", key=name)
    if cfg.effort_scale is not None and not cfg.effort_scale > 0:
        raise ConfigError("effort_scale must be positive", key="effort_scale")
    if not (cfg.beta_mdsmc < 0 and cfg.beta_dsmc < 0):
        raise ConfigError("Sobolev indices must be negative",
                          key="beta_mdsmc" if not cfg.beta_mdsmc < 0 else "beta_dsmc")
    if cfg.n_targets < 1 or cfg.n_runs < 1:
        raise ConfigError("n_targets and n_runs must be at least 1",
                          key="n_targets" if cfg.n_targets < 1 else "n_runs")
    if cfg.n_tracers < 1 or cfg.modes < 1 or cfg.nx < 2 or cfg.ny < 2:
        bad = [k for k, lo in (("n_tracers", 1), ("modes", 1), ("nx", 2), ("ny", 2)) if getattr(cfg, k) < lo]
        raise ConfigError("n_tracers, modes must be >= 1 and grid sizes >= 2", key=bad[0])
    if cfg.start_delay_days < 0:
        raise ConfigError("start_delay_days must be nonnegative", key="start_delay_days")
    if cfg.trajectories not in ("none", "first", "all"):
        raise ConfigError("trajectories must be none, first or all", key="trajectories")
    prev_end = None
    for d in cfg.days:
        if d.agents < 0:
            raise ConfigError("agent counts must be nonnegative", key="agents")
        s, e = d.window()
        if not e > s:
            raise ConfigError(f"search window of day {d.day} is empty", key="window_end_hour")
        if prev_end is not None and s < prev_end:
            raise ConfigError("search windows must be ordered and non-overlapping", key="days")
        prev_end = e
    first_window = cfg.windows()[0][0] if cfg.days else None
    for sp in cfg.splash:
        if len(sp.polygon) < 3:
            raise ConfigError("splash polygon needs at least 3 vertices", key="polygon")
        if first_window is not None and sp.t0_hours > first_window:
            raise ConfigError("splash time falls after the first search window", key="t0_hours")
    if cfg.flow.kind == "file":
        if not cfg.flow.path:
            raise ConfigError("flow kind 'file' needs a path", key="kind")
    elif cfg.flow.kind not in ANALYTIC_FLOWS:
        raise ConfigError(f"unknown flow kind {cfg.flow.kind!r}")


# ---------------------------------------------------------------------------
# text format

_SCALARS = {
    "agents": {"controller": str, "speed_kmh": float, "lawnmower_spacing_km": float},
    "sensor": {"radius_km": float, "expected_time_s": float, "sigma_km": float},
    "planner": {"modes": int, "beta_mdsmc": float, "beta_dsmc": float, "nx": int, "ny": int,
                "bandwidth_km": float, "control_dt_s": float, "budget_window_h": float,
                "effort_scale": float},
    "run": {"n_tracers": int, "n_targets": int, "n_runs": int, "seed": int, "tol_km": float,
            "trajectories": str},
}
_SCHEDULE_KEYS = {"days", "agents", "window_start_hour", "window_end_hour", "start_delay_days"}
_DOMAIN_KEYS = ("x_min", "x_max", "y_min", "y_max")


def _lex(text, path=None):
    """Yield (section, key, value, line) tuples."""
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno, path)
            section = line[1:-1].strip()
            yield section, None, None, lineno
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, path)
        if section is None:
            raise ConfigError("key outside of any section", lineno, path)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", lineno, path)
        yield section, key, value, lineno


def _num(value, kind, line, path, key):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r} as {kind.__name__}", line, path) from None


def _list(value, kind, line, path, key):
    return [_num(v.strip(), kind, line, path, key) for v in value.split(",") if v.strip()]


def _polygon(value, line, path, key):
    pts = []
    for chunk in value.split(";"):
        if not chunk.strip():
            continue
        xy = chunk.split()
        if len(xy) != 2:
            raise ConfigError(f"{key}: vertex {chunk.strip()!r} must be 'x y'", line, path)
        pts.append((_num(xy[0], float, line, path, key), _num(xy[1], float, line, path, key)))
    return tuple(pts)


def parse_text(text: str, path=None, overrides=()) -> ScenarioConfig:
    """Parse a scenario; ``overrides`` are ``section.key=value`` strings applied last."""
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    order = []
    for section, key, value, lineno in _lex(text, path):
        if key is None:
            if section in sections:
                raise ConfigError(f"duplicate section [{section}]", lineno, path)
            sections[section] = {}
            order.append(section)
            continue
        if key in sections[section]:
            raise ConfigError(f"duplicate key {key!r}", lineno, path)
        sections[section][key] = (value, lineno)
    for ov in overrides:
        if "=" not in ov or "." not in ov.split("=", 1)[0]:
            raise ConfigError(f"override {ov!r} must look like section.key=value")
        lhs, value = ov.split("=", 1)
        sec, key = lhs.rsplit(".", 1)
        sections.setdefault(sec.strip(), {})[key.strip()] = (value.strip(), None)
        if sec.strip() not in order:
            order.append(sec.strip())

    kw = {}
    lines = {k: ln for entries in sections.values() for k, (_, ln) in entries.items()}
    splash = []
    flow = FlowSpec()
    days = ()
    reported = {}
    for name in order:
        entries = sections[name]
        if name == "domain":
            missing = [k for k in _DOMAIN_KEYS if k not in entries]
            for k, (v, ln) in entries.items():
                if k not in _DOMAIN_KEYS:
                    raise ConfigError(f"unknown key {k!r} in [domain]", ln, path)
            if missing:
                raise ConfigError(f"[domain] is missing {', '.join(missing)}", None, path)
            try:
                kw["domain"] = Domain(*(_num(entries[k][0], float, entries[k][1], path, k)
                                        for k in _DOMAIN_KEYS))
            except ConfigurationError as exc:
                raise ConfigError(str(exc), entries["x_min"][1], path) from None
        elif name == "flow":
            flow = _parse_flow(entries, path)
        elif name == "splash" or name.startswith("splash."):
            splash.append(_parse_splash(name, entries, path))
        elif name == "schedule":
            days, delay = _parse_schedule(entries, path)
            kw["start_delay_days"] = delay
        elif name == "reported":
            for k, (v, ln) in entries.items():
                if not (k.startswith("day") and k[3:].isdigit()):
                    raise ConfigError(f"unknown key {k!r} in [reported] (expected dayN)", ln, path)
                reported[int(k[3:])] = _polygon(v, ln, path, k)
        elif name in _SCALARS:
            spec = _SCALARS[name]
            for k, (v, ln) in entries.items():
                if k not in spec:
                    raise ConfigError(f"unknown key {k!r} in [{name}]", ln, path)
                if k == "effort_scale" and v.lower() == "auto":
                    kw[k] = None
                    continue
                kw[k] = _num(v, spec[k], ln, path, k)
        else:
            line = next(iter(entries.values()))[1] if entries else None
            raise ConfigError(f"unknown section [{name}]", line, path)

    if "domain" not in kw:
        raise ConfigError("missing [domain] section", None, path)
    known = {d.day for d in days}
    for day in reported:
        if day not in known:
            raise ConfigError(f"[reported] day{day} is not a scheduled search day", None, path)
    days = tuple(dataclasses.replace(d, reported=reported.get(d.day)) for d in days)
    try:
        return ScenarioConfig(splash=tuple(splash), days=days, flow=flow, **kw)
    except ConfigError as exc:
        raise ConfigError(exc.message, lines.get(exc.key), path) from None


def _parse_flow(entries, path):
    if "kind" not in entries:
        raise ConfigError("[flow] needs a 'kind'", None, path)
    kind = entries["kind"][0]
    if kind == "file":
        for k, (v, ln) in entries.items():
            if k not in ("kind", "path"):
                raise ConfigError(f"unknown key {k!r} in [flow] for kind=file", ln, path)
        if "path" not in entries:
            raise ConfigError("[flow] kind=file needs 'path'", entries["kind"][1], path)
        return FlowSpec("file", (), entries["path"][0])
    if kind not in ANALYTIC_FLOWS:
        raise ConfigError(f"unknown flow kind {kind!r}", entries["kind"][1], path)
    allowed = {f.name for f in dataclasses.fields(ANALYTIC_FLOWS[kind])}
    params = []
    for k, (v, ln) in entries.items():
        if k == "kind":
            continue
        if k not in allowed:
            raise ConfigError(f"unknown key {k!r} in [flow] for kind={kind}", ln, path)
        params.append((k, _num(v, float, ln, path, k)))
    return FlowSpec(kind, tuple(sorted(params)))


def _parse_splash(name, entries, path):
    for k, (v, ln) in entries.items():
        if k not in ("polygon", "t0_hours"):
            raise ConfigError(f"unknown key {k!r} in [{name}]", ln, path)
    if "polygon" not in entries:
        raise ConfigError(f"[{name}] needs a polygon", None, path)
    v, ln = entries["polygon"]
    poly = _polygon(v, ln, path, "polygon")
    t0 = _num(entries["t0_hours"][0], float, entries["t0_hours"][1], path, "t0_hours") if "t0_hours" in entries else 0.0
    return SplashSpec(poly, t0, name.partition(".")[2])


def _parse_schedule(entries, path):
    for k, (v, ln) in entries.items():
        if k not in _SCHEDULE_KEYS:
            raise ConfigError(f"unknown key {k!r} in [schedule]", ln, path)
    if "days" not in entries or "agents" not in entries:
        raise ConfigError("[schedule] needs 'days' and 'agents'", None, path)
    v, ln = entries["days"]
    day_list = _list(v, int, ln, path, "days")
    agents = _list(entries["agents"][0], float, entries["agents"][1], path, "agents")
    agents = [int(a) for a in agents]
    n = len(day_list)

    def per_day(key, default, kind):
        if key not in entries:
            return [default] * n
        vals = _list(entries[key][0], float, entries[key][1], path, key)
        if len(vals) == 1:
            vals = vals * n
        if len(vals) != n:
            raise ConfigError(f"{key} must have 1 or {n} entries", entries[key][1], path)
        return [kind(x) for x in vals]

    if len(agents) == 1:
        agents = agents * n
    if len(agents) != n:
        raise ConfigError(f"agents must have 1 or {n} entries", entries["agents"][1], path)
    starts = per_day("window_start_hour", 14.0, float)
    ends = per_day("window_end_hour", 17.0, float)
    delay = _num(entries["start_delay_days"][0], float, entries["start_delay_days"][1], path,
                 "start_delay_days") if "start_delay_days" in entries else 0.0
    days = tuple(SearchDay(d, a, s, e) for d, a, s, e in zip(day_list, agents, starts, ends))
    return days, float(delay)


def parse_config(path, overrides=()) -> ScenarioConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, path) from None
    return parse_text(text, path=str(p), overrides=overrides)


def _fmt_poly(poly):
    return "; ".join(f"{repr(float(x))} {repr(float(y))}" for x, y in poly)


def to_text(cfg: ScenarioConfig) -> str:
    """Canonical text form; ``parse_text(to_text(c)) == c``."""
    d = cfg.domain
    out = ["[domain]", f"x_min = {repr(float(d.x_min))}", f"x_max = {repr(float(d.x_max))}",
           f"y_min = {repr(float(d.y_min))}", f"y_max = {repr(float(d.y_max))}", "", "[flow]", f"kind = {cfg.flow.kind}"]
    if cfg.flow.kind == "file":
        out.append(f"path = {cfg.flow.path}")
    out += [f"{k} = {v!r}" for k, v in cfg.flow.params]
    for i, sp in enumerate(cfg.splash):
        name = "splash" if i == 0 and not sp.name else f"splash.{sp.name or i}"
        out += ["", f"[{name}]", f"polygon = {_fmt_poly(sp.polygon)}", f"t0_hours = {repr(float(sp.t0_hours))}"]
    out += ["", "[schedule]",
            "days = " + ", ".join(str(x.day) for x in cfg.days),
            "agents = " + ", ".join(str(x.agents) for x in cfg.days),
            "window_start_hour = " + ", ".join(repr(x.start_hour) for x in cfg.days),
            "window_end_hour = " + ", ".join(repr(x.end_hour) for x in cfg.days),
            f"start_delay_days = {repr(float(cfg.start_delay_days))}"]
    rep = [x for x in cfg.days if x.reported]
    if rep:
        out += ["", "[reported]"] + [f"day{x.day} = {_fmt_poly(x.reported)}" for x in rep]
    for sec, keys in _SCALARS.items():
        out += ["", f"[{sec}]"]
        for k in keys:
            v = getattr(cfg, k)
            out.append(f"{k} = {'auto' if v is None else (v if isinstance(v, str) else repr(v))}")
    return "\n".join(out) + "\n"


DEFAULTS_HELP = """\
defaults: sigma_km=3 speed_kmh=380 radius_km=1.5 expected_time_s=2
          beta_mdsmc=-0.5 beta_dsmc=-1.5 modes=32 nx=ny=128 control_dt_s=60
          budget_window_h=1 bandwidth_km=3 lawnmower_spacing_km=3
          window 14:00-17:00 n_tracers=10000 n_targets=1000 n_runs=100"""
