"""Disk-backed motion library for the service.

Documents are kept as the exact bytes each client uploaded, so a GET
after a PUT is verbatim. Writes go through a temp file and an atomic
rename; the packaged motions act as read-only fallbacks until a client
saves over them.
"""

from __future__ import annotations

import hashlib
import os
import re
import tempfile
from importlib import resources
from pathlib import Path

from ..motions import Motion, MotionError, motion_from_json_bytes

# names double as filenames, so keep them to one safe path segment
NAME_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_\-]{0,63}$")


def etag_of(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


class MotionStore:
    def __init__(self, directory: str | Path, shipped: bool = True):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._shipped: dict[str, bytes] = {}
        if shipped:
            base = resources.files("humotion.data").joinpath("motions")
            for entry in base.iterdir():
                if entry.name.endswith(".json"):
                    self._shipped[entry.name[:-5]] = entry.read_bytes()

    @staticmethod
    def check_name(name: str) -> None:
        if not NAME_PATTERN.match(name):
            raise MotionError(f"invalid motion name {name!r}")

    def names(self) -> list[str]:
        on_disk = {p.stem for p in self.directory.glob("*.json")}
        return sorted(on_disk | set(self._shipped))

    def __contains__(self, name: str) -> bool:
        return (self.directory / f"{name}.json").exists() or name in self._shipped

    def read(self, name: str) -> bytes:
        self.check_name(name)
        path = self.directory / f"{name}.json"
        if path.exists():
            return path.read_bytes()
        if name in self._shipped:
            return self._shipped[name]
        raise KeyError(name)

    def etag(self, name: str) -> str:
        return etag_of(self.read(name))

    def write(self, name: str, raw: bytes) -> Motion:
        """Validate and persist a motion document under the given name."""
        self.check_name(name)
        motion = motion_from_json_bytes(raw)
        if motion.name != name:
            raise MotionError(f"document is named {motion.name!r}, not {name!r}")
        target = self.directory / f"{name}.json"
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=name, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(raw)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return motion
