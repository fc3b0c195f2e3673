"""Scenario files: the experiment inputs, parsed and validated.

A scenario is a line-oriented text file. ``#`` starts a comment, blank
lines are ignored, and every other line is a directive followed by
whitespace-separated arguments. Every time value carries an explicit
``us`` suffix so microseconds never get confused with milliseconds or
seconds. The first directive must be ``format txsched/1``.

Directives::

    format txsched/1
    connection <id> deadline <T>us packets <N> [airtime <T>us] [overhead <T>us]
    scheduler step <T>us [margin <T>us] [ordering input-order|deadline-ascending]
    schedulers <name> [<name> ...]          # tsgs, exhaustive, random
    channel [slot_time <T>us] [aifs <T>us] [cw <N>] [airtime <T>us]
            [ambient_loss <P>]
    sweep start <T>us stop <T>us step <T>us
    seeds <N> [<N> ...]                     # repeatable, appends

``connection`` lines may omit ``airtime``; the channel's airtime is used.
``channel`` and ``sweep`` are optional; everything else is required.
Errors carry ``path:line:`` prefixes pointing at the offending directive.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .core import InadmissibleRequestError, TimeSpan, TransmissionRequest, window
from .schedulers import ORDERINGS, SchedulerConfig
from .simulator import ChannelConfig

FORMAT_TAG = "txsched/1"

SCHEDULER_NAMES = ("exhaustive", "random", "tsgs")


class ScenarioError(ValueError):
    """A scenario file failed to parse or validate."""


@dataclass(frozen=True)
class WindowSweep:
    """Evenly spaced window sizes applied to every connection's deadline."""

    start: TimeSpan
    stop: TimeSpan
    step: TimeSpan

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValueError(f"sweep step must be > 0, got {self.step}")
        if self.start < 0:
            raise ValueError(f"sweep start must be >= 0, got {self.start}")
        if self.stop < self.start:
            raise ValueError(
                f"sweep stop {self.stop} is below start {self.start}"
            )

    def points(self) -> list[TimeSpan]:
        return list(range(self.start, self.stop + 1, self.step))


@dataclass(frozen=True)
class ScenarioSpec:
    """A fully validated experiment description."""

    requests: tuple[TransmissionRequest, ...]
    schedulers: tuple[str, ...]
    scheduler_config: SchedulerConfig
    channel: ChannelConfig
    seeds: tuple[int, ...]
    sweep: WindowSweep | None = None


def _fail(source: str, lineno: int, message: str) -> None:
    raise ScenarioError(f"{source}:{lineno}: {message}")


def _parse_us(source: str, lineno: int, field: str, token: str) -> int:
    if not token.endswith("us"):
        _fail(source, lineno, f"{field} must carry a 'us' suffix, got {token!r}")
    try:
        value = int(token[:-2])
    except ValueError:
        _fail(source, lineno, f"{field} is not an integer microsecond value: {token!r}")
    return value


def _parse_int(source: str, lineno: int, field: str, token: str) -> int:
    try:
        return int(token)
    except ValueError:
        _fail(source, lineno, f"{field} is not an integer: {token!r}")


def _parse_float(source: str, lineno: int, field: str, token: str) -> float:
    try:
        return float(token)
    except ValueError:
        _fail(source, lineno, f"{field} is not a number: {token!r}")


def _pairs(source: str, lineno: int, directive: str, args: list[str]):
    if len(args) % 2 != 0:
        _fail(source, lineno, f"{directive} expects key/value pairs")
    return zip(args[::2], args[1::2])


def parse_scenario(text: str, source: str = "<string>") -> ScenarioSpec:
    """Parse scenario text; `source` names it in error messages."""
    format_seen = False
    connections: list[tuple[int, dict, int]] = []  # (id, fields, lineno)
    config: SchedulerConfig | None = None
    scheduler_names: list[str] = []
    channel: ChannelConfig | None = None
    sweep: WindowSweep | None = None
    seeds: list[int] = []
    seen_ids: set[int] = set()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        directive, args = tokens[0], tokens[1:]
        if not format_seen:
            if directive != "format":
                _fail(source, lineno, f"first directive must be 'format {FORMAT_TAG}'")
            if args != [FORMAT_TAG]:
                _fail(source, lineno, f"unsupported format {' '.join(args)!r}")
            format_seen = True
            continue
        if directive == "format":
            _fail(source, lineno, "duplicate format directive")
        elif directive == "connection":
            if not args:
                _fail(source, lineno, "connection needs an id")
            conn_id = _parse_int(source, lineno, "connection id", args[0])
            if conn_id in seen_ids:
                _fail(source, lineno, f"duplicate connection id {conn_id}")
            seen_ids.add(conn_id)
            fields: dict = {}
            for key, value in _pairs(source, lineno, "connection", args[1:]):
                if key in ("deadline", "airtime", "overhead"):
                    fields[key] = _parse_us(source, lineno, key, value)
                elif key == "packets":
                    fields[key] = _parse_int(source, lineno, key, value)
                else:
                    _fail(source, lineno, f"unknown connection field {key!r}")
            for required in ("deadline", "packets"):
                if required not in fields:
                    _fail(
                        source, lineno,
                        f"connection {conn_id} is missing {required!r}",
                    )
            connections.append((conn_id, fields, lineno))
        elif directive == "scheduler":
            if config is not None:
                _fail(source, lineno, "duplicate scheduler directive")
            fields = {}
            for key, value in _pairs(source, lineno, "scheduler", args):
                if key in ("step", "margin"):
                    fields[key] = _parse_us(source, lineno, key, value)
                elif key == "ordering":
                    if value not in ORDERINGS:
                        _fail(
                            source, lineno,
                            f"ordering must be one of {ORDERINGS}, got {value!r}",
                        )
                    fields[key] = value
                else:
                    _fail(source, lineno, f"unknown scheduler field {key!r}")
            if "step" not in fields:
                _fail(source, lineno, "scheduler is missing 'step'")
            try:
                config = SchedulerConfig(**fields)
            except ValueError as exc:
                _fail(source, lineno, f"invalid scheduler: {exc}")
        elif directive == "schedulers":
            if scheduler_names:
                _fail(source, lineno, "duplicate schedulers directive")
            if not args:
                _fail(source, lineno, "schedulers needs at least one name")
            for name in args:
                if name not in SCHEDULER_NAMES:
                    _fail(
                        source, lineno,
                        f"unknown scheduler {name!r}; expected one of "
                        f"{SCHEDULER_NAMES}",
                    )
                if name in scheduler_names:
                    _fail(source, lineno, f"scheduler {name!r} listed twice")
                scheduler_names.append(name)
        elif directive == "channel":
            if channel is not None:
                _fail(source, lineno, "duplicate channel directive")
            fields = {}
            for key, value in _pairs(source, lineno, "channel", args):
                if key in ("slot_time", "aifs", "airtime"):
                    fields[key] = _parse_us(source, lineno, key, value)
                elif key == "cw":
                    fields[key] = _parse_int(source, lineno, key, value)
                elif key == "ambient_loss":
                    fields[key] = _parse_float(source, lineno, key, value)
                else:
                    _fail(source, lineno, f"unknown channel field {key!r}")
            try:
                channel = ChannelConfig(
                    slot_time=fields.get("slot_time", 13),
                    aifs=fields.get("aifs", 58),
                    cw=fields.get("cw", 15),
                    packet_airtime=fields.get("airtime", 23),
                    ambient_loss_rate=fields.get("ambient_loss", 0.0),
                )
            except ValueError as exc:
                _fail(source, lineno, f"invalid channel: {exc}")
        elif directive == "sweep":
            if sweep is not None:
                _fail(source, lineno, "duplicate sweep directive")
            fields = {}
            for key, value in _pairs(source, lineno, "sweep", args):
                if key in ("start", "stop", "step"):
                    fields[key] = _parse_us(source, lineno, key, value)
                else:
                    _fail(source, lineno, f"unknown sweep field {key!r}")
            for required in ("start", "stop", "step"):
                if required not in fields:
                    _fail(source, lineno, f"sweep is missing {required!r}")
            try:
                sweep = WindowSweep(**fields)
            except ValueError as exc:
                _fail(source, lineno, f"invalid sweep: {exc}")
        elif directive == "seeds":
            if not args:
                _fail(source, lineno, "seeds needs at least one value")
            for token in args:
                seed = _parse_int(source, lineno, "seed", token)
                if seed in seeds:
                    _fail(source, lineno, f"seed {seed} listed twice")
                seeds.append(seed)
        else:
            _fail(source, lineno, f"unknown directive {directive!r}")

    if not format_seen:
        _fail(source, 1, f"missing 'format {FORMAT_TAG}' directive")
    if not connections:
        _fail(source, 1, "scenario defines no connections")
    if config is None:
        _fail(source, 1, "scenario is missing the scheduler directive")
    if not scheduler_names:
        _fail(source, 1, "scenario is missing the schedulers directive")
    if not seeds:
        _fail(source, 1, "scenario defines no seeds")
    if channel is None:
        channel = ChannelConfig()

    requests = []
    for conn_id, fields, lineno in connections:
        try:
            request = TransmissionRequest(
                id=conn_id,
                deadline=fields["deadline"],
                packet_count=fields["packets"],
                packet_airtime=fields.get("airtime", channel.packet_airtime),
                per_packet_overhead=fields.get("overhead", 0),
            )
            window(request, config.margin)  # admissibility under this margin
        except (InadmissibleRequestError, ValueError) as exc:
            _fail(source, lineno, f"invalid connection {conn_id}: {exc}")
        requests.append(request)

    return ScenarioSpec(
        requests=tuple(requests),
        schedulers=tuple(scheduler_names),
        scheduler_config=config,
        channel=channel,
        seeds=tuple(seeds),
        sweep=sweep,
    )


def load_scenario(path: str | Path) -> ScenarioSpec:
    """Load and validate a scenario file.

    Raises:
        ScenarioError: the file does not parse or an invariant fails; the
            message carries a path:line prefix.
        OSError: the file cannot be read.
    """
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), source=str(path))
