"""Shared bookkeeping for extensions that rescan only what changed."""
from __future__ import annotations

from typing import Iterable

from ..programmatic import AssignmentView


class DirtyTracker:
    """Maps variables to the items (groups, gate instances) that read them.

    :meth:`dirty` reports every item touching a variable that was assigned,
    or unassigned by a backjump, since the previous call through the same view.
    """

    def __init__(self, items_vars: Iterable[Iterable[int]], ignore: Iterable[int] = ()):
        skip = {abs(v) for v in ignore}
        self.by_var: dict[int, list[int]] = {}
        self.size = 0
        for idx, vs in enumerate(items_vars):
            self.size = idx + 1
            for v in vs:
                v = abs(v)
                if v in skip:
                    continue
                lst = self.by_var.setdefault(v, [])
                if not lst or lst[-1] != idx:
                    lst.append(idx)
        self._shadow: list[int] = []

    def dirty(self, view: AssignmentView) -> list[int]:
        new = view.new_literals()
        start = view.num_assigned - len(new)
        shadow = self._shadow
        by_var = self.by_var
        out: set[int] = set()
        for lit in shadow[start:]:
            out.update(by_var.get(abs(lit), ()))
        del shadow[start:]
        shadow.extend(new)
        for lit in new:
            out.update(by_var.get(abs(lit), ()))
        return sorted(out)
