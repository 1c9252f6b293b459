"""Name -> variable-ID sidecar for CNF files.

Text format, one record per line::

    # varmap function=sha256 rounds=16 generator=cdclcrypto/0.1.0
    W[0] 32 2 3 4 ...

IDs are DIMACS literals listed LSB first. A negative entry means the name's
bit is the negation of that variable (constant bits use the reserved true
variable).
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence


class VarMapError(ValueError):
    pass


class VarMap:
    def __init__(self, meta: dict[str, str] | None = None):
        self.meta: dict[str, str] = dict(meta or {})
        self._names: dict[str, tuple[int, ...]] = {}

    def register(self, name: str, ids: Sequence[int]) -> None:
        if not name or any(ch.isspace() for ch in name):
            raise VarMapError(f"invalid name {name!r}")
        if name in self._names:
            raise VarMapError(f"duplicate name {name!r}")
        self._names[name] = tuple(ids)

    def __getitem__(self, name: str) -> tuple[int, ...]:
        try:
            return self._names[name]
        except KeyError:
            raise KeyError(f"unknown name {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._names

    def __iter__(self) -> Iterator[str]:
        return iter(self._names)

    def __len__(self) -> int:
        return len(self._names)

    def items(self):
        return self._names.items()

    def __eq__(self, other) -> bool:
        return isinstance(other, VarMap) and self._names == other._names and self.meta == other.meta

    def word_value(self, name: str, model: Sequence[bool]) -> int:
        """Integer value of a registered word under a 0-indexed model."""
        value = 0
        for i, lit in enumerate(self[name]):
            bit = model[abs(lit) - 1] == (lit > 0)
            value |= bit << i
        return value

    def dumps(self) -> str:
        head = " ".join(f"{k}={v}" for k, v in self.meta.items())
        lines = [f"# varmap {head}".rstrip()]
        for name, ids in self._names.items():
            lines.append(f"{name} {len(ids)} " + " ".join(map(str, ids)))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str | Iterable[str]) -> "VarMap":
        lines = text.splitlines() if isinstance(text, str) else list(text)
        vm = cls()
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts and parts[0] == "varmap":
                    for kv in parts[1:]:
                        k, _, v = kv.partition("=")
                        vm.meta[k] = v
                continue
            parts = line.split()
            if len(parts) < 2:
                raise VarMapError(f"line {lineno}: malformed record")
            try:
                count = int(parts[1])
                ids = [int(x) for x in parts[2:]]
            except ValueError:
                raise VarMapError(f"line {lineno}: non-integer field") from None
            if count != len(ids):
                raise VarMapError(f"line {lineno}: count {count} but {len(ids)} ids")
            try:
                vm.register(parts[0], ids)
            except VarMapError as exc:
                raise VarMapError(f"line {lineno}: {exc}") from None
        return vm
