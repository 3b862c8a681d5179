"""Run configuration shared by the command-line subcommands.

A configuration file is a JSON object whose keys mirror :class:`RunConfig`;
command-line flags override the file, which overrides the defaults.

Examples
--------
>>> cfg = RunConfig.from_mapping({"dims": [8, 16], "seed": 3})
>>> cfg.dims, cfg.seed, cfg.thresholds.L2
((8, 16), 3, 10.0)
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import DomainError
from .verify import Thresholds
from .wavelet import Ramp

__all__ = ["RunConfig", "load_config", "MIN_DIM", "MAX_DIM", "MAX_RANK"]

MIN_DIM = 2
MAX_DIM = 256
MAX_RANK = 20
FORMATS = ("json", "csv")

DEFAULT_DIMS = (8, 16, 32, 64, 128, 256)


@dataclass(frozen=True)
class RunConfig:
    """Validated settings of one command-line run.

    Attributes
    ----------
    dims : tuple of int
        Dimensions, each in ``[2, 256]``.
    max_rank : int or None
        Largest arc rank, in ``[0, 20]``; ``None`` selects the default of
        each operation.
    max_rd : int
        Largest relative distance of the analysis checks.
    ramp : Ramp
    seed : int
    out : str or None
        Output path; ``None`` writes to standard output.
    format : str
        ``"json"`` or ``"csv"``; ``None`` selects the default of the command.
    threads : int
    thresholds : Thresholds
    """

    dims: tuple = DEFAULT_DIMS
    max_rank: int | None = None
    max_rd: int = 8
    ramp: Ramp = Ramp.POLYNOMIAL_C3
    seed: int = 0
    out: str | None = None
    format: str | None = None
    threads: int = 1
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self):
        for name in ("max_rank", "max_rd", "seed", "threads"):
            value = getattr(self, name)
            if value is None and name == "max_rank":
                continue
            if isinstance(value, bool) or not isinstance(value, int):
                raise DomainError(f"{name} must be an integer, got {value!r}")
        if any(isinstance(N, bool) or not isinstance(N, int) for N in self.dims):
            raise DomainError(f"dims must be integers, got {list(self.dims)!r}")
        dims = tuple(self.dims)
        if not dims:
            raise DomainError("dims must not be empty")
        for N in dims:
            if not MIN_DIM <= N <= MAX_DIM:
                raise DomainError(f"dimension {N} outside [{MIN_DIM}, {MAX_DIM}]")
        object.__setattr__(self, "dims", dims)
        if self.max_rank is not None and not 0 <= int(self.max_rank) <= MAX_RANK:
            raise DomainError(f"max_rank {self.max_rank} outside [0, {MAX_RANK}]")
        if int(self.max_rd) < 0:
            raise DomainError("max_rd must be >= 0")
        if int(self.threads) < 1:
            raise DomainError("threads must be >= 1")
        if self.format is not None and self.format not in FORMATS:
            raise DomainError(f"format must be one of {FORMATS}, got {self.format!r}")
        object.__setattr__(self, "ramp", Ramp.parse(self.ramp))

    @classmethod
    def from_mapping(cls, doc) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(doc) - known)
        if unknown:
            raise DomainError(f"unknown configuration keys {unknown}")
        values = dict(doc)
        if "thresholds" in values and not isinstance(values["thresholds"], Thresholds):
            values["thresholds"] = Thresholds.from_mapping(values["thresholds"])
        if "dims" in values:
            values["dims"] = tuple(values["dims"])
        return cls(**values)

    def updated(self, **changes) -> "RunConfig":
        """Copy with the given fields replaced; ``None`` values are ignored."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "max_rank": self.max_rank,
            "max_rd": self.max_rd,
            "ramp": self.ramp.value,
            "seed": self.seed,
            "out": self.out,
            "format": self.format,
            "threads": self.threads,
            "thresholds": self.thresholds.to_dict(),
        }


def load_config(path: str | Path) -> RunConfig:
    """Read a JSON configuration file.

    Raises
    ------
    DomainError
        If the file cannot be read or holds invalid values.
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read configuration {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise DomainError("configuration must be a JSON object")
    return RunConfig.from_mapping(doc)
