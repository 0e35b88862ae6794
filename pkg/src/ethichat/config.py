"""Key-value service configuration.

One `key = value` pair per line, `#` comments.  Relative paths resolve
against the config file's directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ethichat.errors import ConfigError

_PACKAGE_DATA = Path(__file__).parent / "data"


@dataclass
class ServiceConfig:
    kb_dir: Path
    patterns_file: Path
    modes_file: Path
    responder_file: Path
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000
    stage_deadline: float = 5.0
    max_ground_atoms: int = 100_000
    event_log: Path | None = None

    @classmethod
    def defaults(cls, kb_dir: str | Path) -> "ServiceConfig":
        return cls(
            kb_dir=Path(kb_dir),
            patterns_file=_PACKAGE_DATA / "patterns.txt",
            modes_file=_PACKAGE_DATA / "modes.txt",
            responder_file=_PACKAGE_DATA / "responder.txt",
        )

    @classmethod
    def load(cls, path: str | Path) -> "ServiceConfig":
        path = Path(path)
        base = path.parent
        values: dict[str, str] = {}
        for n, line in enumerate(path.read_text().splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{n}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value

        def resolve(key, default=None):
            raw = values.get(key)
            if raw is None:
                if default is None:
                    raise ConfigError(f"{path}: missing required key {key!r}")
                return default
            p = Path(raw)
            return p if p.is_absolute() else base / p

        cfg = cls(
            kb_dir=resolve("kb_dir"),
            patterns_file=resolve("patterns", _PACKAGE_DATA / "patterns.txt"),
            modes_file=resolve("modes", _PACKAGE_DATA / "modes.txt"),
            responder_file=resolve("responder", _PACKAGE_DATA / "responder.txt"),
        )
        if "listen_host" in values:
            cfg.listen_host = values["listen_host"]
        if "listen_port" in values:
            cfg.listen_port = int(values["listen_port"])
        if "stage_deadline" in values:
            cfg.stage_deadline = float(values["stage_deadline"])
        if "max_ground_atoms" in values:
            cfg.max_ground_atoms = int(values["max_ground_atoms"])
        if "event_log" in values:
            cfg.event_log = resolve("event_log")
        return cfg

    def validate(self) -> None:
        for name in ("patterns_file", "modes_file", "responder_file"):
            p = getattr(self, name)
            if not Path(p).exists():
                raise ConfigError(f"{name} does not exist: {p}")
